"""Directed weighted graph stored as a hash table of parallel adjacency lists.

Each source vertex with at least one outgoing edge maps to a pair of
index-aligned lists ``(neighbors, weights)``.  Vertices that only receive
edges are tracked in :attr:`Graph.vertices` but get no table entry.
"""

from __future__ import annotations

import re
from collections import deque
from itertools import chain
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "EdgeTriple",
    "EmptyGraphError",
    "Graph",
    "GraphFormatError",
    "InvalidWeightError",
    "bfs_layers",
    "largest_component",
    "load_edge_list",
    "parse_edge_lines",
    "write_edge_list",
]

_FIELD_SEP = re.compile(r"\s*,\s*|\s+")
_COMMENT_PREFIXES = ("#", "%")
WEIGHT_POLICIES = ("scale-min", "reject")


def _order_pairs(major, minor, *, stable):
    """Argsort by ``(major, minor)``; one combined key when it fits in int64."""
    bound = int(minor.max()) + 1
    if int(major.max()) < (1 << 62) // bound:
        return np.argsort(major * bound + minor, kind="stable" if stable else "quicksort")
    return np.lexsort((minor, major))


class GraphFormatError(ValueError):
    """A line of an edge-list file could not be parsed."""

    def __init__(self, lineno, line, reason):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class InvalidWeightError(ValueError):
    """An edge weight lies outside the accepted domain."""


class EmptyGraphError(ValueError):
    """The input contained no edges or vertices."""


class EdgeTriple(tuple):
    """``(src, dst, weight)`` with named access."""

    __slots__ = ()

    def __new__(cls, src: int, dst: int, weight: float = 1.0):
        return super().__new__(cls, (src, dst, float(weight)))

    src = property(lambda self: self[0])
    dst = property(lambda self: self[1])
    weight = property(lambda self: self[2])


class Graph:
    """Dynamic directed weighted graph.

    Invariants kept by every mutator: lists under a key have equal length,
    weights are ``>= 1``, there are no self-loops and no repeated neighbor
    within one list.  Neighbor order is first-insertion order.

    After construction the object is only read, so it may be shared by
    concurrent readers.
    """

    __slots__ = ("adjacency", "vertices", "edge_count", "_in_deg", "_out_weight")

    def __init__(self):
        self.adjacency: dict[int, tuple[list[int], list[float]]] = {}
        self.vertices: set[int] = set()
        self.edge_count = 0
        self._in_deg: dict[int, int] = {}
        self._out_weight: dict[int, float] = {}

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], *, directed: bool = True) -> "Graph":
        """Build a graph from ``(src, dst[, weight])`` tuples.

        Duplicates are merged by summing weights; self-loops are dropped but
        their endpoint is still registered as a vertex.  Weights must already
        be ``>= 1``.
        """
        edges = edges if isinstance(edges, list) else list(edges)
        n = len(edges)
        if n and set(map(len, edges)) == {2}:
            # unweighted pairs flatten in one C-level pass
            flat = np.fromiter(chain.from_iterable(edges), np.int64, 2 * n)
            return cls.from_arrays(flat[0::2], flat[1::2], None, directed=directed)
        src = np.fromiter((e[0] for e in edges), np.int64, n)
        dst = np.fromiter((e[1] for e in edges), np.int64, n)
        w = np.fromiter((e[2] if len(e) > 2 else 1.0 for e in edges), np.float64, n)
        return cls.from_arrays(src, dst, w, directed=directed)

    @classmethod
    def from_arrays(cls, src, dst, weights=None, *, directed: bool = True) -> "Graph":
        """Array form of :meth:`from_edges`; row ``i`` is edge ``src[i] -> dst[i]``."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        w = np.ones(len(src)) if weights is None else np.asarray(weights, dtype=np.float64)
        if not (len(src) == len(dst) == len(w)):
            raise ValueError("edge arrays must have equal length")
        bad = np.flatnonzero(~(w >= 1.0))
        if len(bad):
            i = bad[0]
            raise InvalidWeightError(f"edge ({src[i]}, {dst[i]}) has weight {w[i]} < 1")
        if len(src) and min(src.min(), dst.min()) < 0:
            raise ValueError("vertex ids must be non-negative")
        g = cls()
        g.vertices = set(np.unique(np.concatenate([src, dst])).tolist())
        if not directed:
            # insertion sequence is (u, v), (v, u) per input edge
            src, dst = np.column_stack([src, dst]).ravel(), np.column_stack([dst, src]).ravel()
            w = np.repeat(w, 2)
        loop = src == dst
        if loop.any():
            src, dst, w = src[~loop], dst[~loop], w[~loop]
        if not len(src):
            return g

        # group identical (src, dst) pairs; stable sort keeps input order inside a group
        pos = _order_pairs(src, dst, stable=True)
        s, d = src[pos], dst[pos]
        head = np.ones(len(s), dtype=bool)
        head[1:] = (s[1:] != s[:-1]) | (d[1:] != d[:-1])
        group = np.cumsum(head) - 1
        first = pos[head]
        wsum = np.bincount(group, weights=w[pos])
        us, vs = s[head], d[head]

        # neighbors in first-occurrence order, keys in first-occurrence order
        order = _order_pairs(us, first, stable=False)
        us, vs, wsum, first = us[order], vs[order], wsum[order], first[order]
        bounds = np.flatnonzero(np.r_[True, us[1:] != us[:-1], True])
        lo = bounds[:-1]
        key_order = np.argsort(first[lo], kind="stable")

        nbrs_all = vs.tolist()
        # equal weights share one float object, which keeps propagation sweeps cache-friendly
        values, inverse = np.unique(wsum, return_inverse=True)
        shared = np.empty(len(values), dtype=object)
        shared[:] = values.tolist()
        wts_all = shared[inverse.ravel()].tolist()
        keys = us[lo].tolist()
        cuts = bounds.tolist()
        adjacency = g.adjacency
        out_weight = g._out_weight
        for i in key_order.tolist():
            a, b = cuts[i], cuts[i + 1]
            wts = wts_all[a:b]
            adjacency[keys[i]] = (nbrs_all[a:b], wts)
            out_weight[keys[i]] = sum(wts)
        targets, counts = np.unique(vs, return_counts=True)
        g._in_deg = dict(zip(targets.tolist(), counts.tolist()))
        g.edge_count = len(nbrs_all)
        return g

    # -- queries -----------------------------------------------------------

    def neighborhood(self, u: int) -> tuple[list[int], list[float]]:
        """Return ``(neighbors, weights)`` of ``u``; empty lists if none."""
        entry = self.adjacency.get(u)
        if entry is None:
            return [], []
        return entry

    def out_degree(self, u: int) -> int:
        entry = self.adjacency.get(u)
        return 0 if entry is None else len(entry[0])

    def in_degree(self, u: int) -> int:
        return self._in_deg.get(u, 0)

    def weighted_out_degree(self, u: int) -> float:
        return self._out_weight.get(u, 0.0)

    def stored_entries(self) -> int:
        """Number of list slots held by the table (neighbors plus weights)."""
        return sum(len(n) + len(w) for n, w in self.adjacency.values())

    def edges(self) -> Iterator[EdgeTriple]:
        for u, (nbrs, wts) in self.adjacency.items():
            for v, w in zip(nbrs, wts):
                yield EdgeTriple(u, v, w)

    def weight(self, u: int, v: int) -> float | None:
        """Weight of edge ``(u, v)`` or ``None``; linear in ``out_degree(u)``."""
        nbrs, wts = self.neighborhood(u)
        try:
            return wts[nbrs.index(v)]
        except ValueError:
            return None

    def __contains__(self, u) -> bool:
        return u in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.vertices)}, |E|={self.edge_count})"

    # -- mutation ----------------------------------------------------------

    def add_edge(self, edge) -> "Graph":
        """Insert ``(src, dst, weight)``, merging into an existing edge by sum.

        Cost is linear in the current out-degree of ``src``.
        """
        u, v = edge[0], edge[1]
        w = float(edge[2]) if len(edge) > 2 else 1.0
        if not w >= 1.0:
            raise InvalidWeightError(f"edge ({u}, {v}) has weight {w} < 1")
        self.vertices.add(u)
        self.vertices.add(v)
        if u == v:
            return self
        entry = self.adjacency.get(u)
        if entry is None:
            entry = self.adjacency[u] = ([], [])
        nbrs, wts = entry
        try:
            i = nbrs.index(v)
        except ValueError:
            nbrs.append(v)
            wts.append(w)
            self.edge_count += 1
            self._in_deg[v] = self._in_deg.get(v, 0) + 1
        else:
            wts[i] += w
        self._out_weight[u] = self._out_weight.get(u, 0.0) + w
        return self


# -- ingestion ---------------------------------------------------------------


def parse_edge_lines(lines: Iterable[str], *, weighted: bool = True) -> Iterator[tuple[int, int, float]]:
    """Yield raw ``(src, dst, weight)`` triples from edge-list text lines.

    Raw weights are only checked for positivity here; normalization to the
    ``>= 1`` domain happens in :func:`load_edge_list`.
    """
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        fields = _FIELD_SEP.split(line)
        if len(fields) < 2 or len(fields) > 3:
            raise GraphFormatError(lineno, line, "expected 'src dst [weight]'")
        try:
            u = int(fields[0])
            v = int(fields[1])
        except ValueError:
            raise GraphFormatError(lineno, line, "vertex ids must be integers") from None
        if u < 0 or v < 0:
            raise GraphFormatError(lineno, line, "vertex ids must be non-negative")
        w = 1.0
        if weighted and len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise GraphFormatError(lineno, line, "weight is not a number") from None
            if not w > 0.0:
                raise InvalidWeightError(f"line {lineno}: weight must be positive, got {fields[2]}")
        yield u, v, w


def load_edge_list(
    path,
    *,
    directed: bool = True,
    weighted: bool = True,
    weight_normalization: str = "scale-min",
) -> Graph:
    """Read an edge-list file into a :class:`Graph`.

    Args:
        path: text file with one ``src dst [weight]`` edge per line. Fields
            are separated by whitespace or a comma; ``#`` and ``%`` start
            comment lines.
        directed: if false every edge is stored in both directions.
        weighted: if false the weight column is ignored and all weights
            are 1.0.
        weight_normalization: ``"scale-min"`` divides every weight by the
            smallest one when any weight is below 1; ``"reject"`` raises
            :class:`InvalidWeightError` instead.

    Raises:
        GraphFormatError: a line does not parse (carries the line number).
        InvalidWeightError: a weight is zero, negative, or below 1 under
            the ``reject`` policy.
        EmptyGraphError: the file contains no edges.
    """
    if weight_normalization not in WEIGHT_POLICIES:
        raise ValueError(f"unknown weight normalization {weight_normalization!r}")
    with open(Path(path), encoding="utf-8") as fh:
        triples = list(parse_edge_lines(fh, weighted=weighted))
    if not triples:
        raise EmptyGraphError(f"empty-graph: no edges in {path}")
    w_min = min(t[2] for t in triples)
    if w_min < 1.0:
        if weight_normalization == "reject":
            raise InvalidWeightError(f"weight {w_min} < 1 and normalization is 'reject'")
        triples = [(u, v, max(w / w_min, 1.0)) for u, v, w in triples]
    return Graph.from_edges(triples, directed=directed)


def write_edge_list(g: Graph, path, *, weighted: bool = True) -> None:
    """Write ``g`` to a path or open text file in edge-list format.

    :func:`load_edge_list` reads the output back to an identical graph.

    Sources are written in table order and neighbors in list order, which
    the loader's first-occurrence rule preserves.  Vertices with no edges
    at all are written as self-loops so they survive the round trip.
    """
    if hasattr(path, "write"):
        _write_edges(g, path, weighted)
        return
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        _write_edges(g, fh, weighted)


def _write_edges(g, fh, weighted):
    touched = set()
    for u, (nbrs, wts) in g.adjacency.items():
        touched.add(u)
        for v, w in zip(nbrs, wts):
            touched.add(v)
            fh.write(f"{u} {v} {w!r}\n" if weighted else f"{u} {v}\n")
    for u in sorted(g.vertices - touched):
        fh.write(f"{u} {u}\n")


# -- traversal ---------------------------------------------------------------


def bfs_layers(g: Graph, source: int) -> list[set[int]]:
    """Vertices grouped by shortest out-distance from ``source``.

    Layer ``i`` holds the vertices first reached after ``i`` hops; together
    the layers partition the set reachable from ``source``.
    """
    if source not in g.vertices:
        raise KeyError(f"unknown source vertex {source}")
    seen = {source}
    layers = [{source}]
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.neighborhood(u)[0]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if not nxt:
            break
        layers.append(set(nxt))
        frontier = nxt
    return layers


def largest_component(g: Graph) -> set[int]:
    """Largest weakly connected vertex set; ties go to the smallest vertex id."""
    undirected: dict[int, list[int]] = {}
    for u, (nbrs, _) in g.adjacency.items():
        undirected.setdefault(u, []).extend(nbrs)
        for v in nbrs:
            undirected.setdefault(v, []).append(u)
    seen: set[int] = set()
    best: set[int] = set()
    for start in sorted(g.vertices):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in undirected.get(u, ()):
                if v not in comp:
                    comp.add(v)
                    queue.append(v)
        seen |= comp
        # iteration is in ascending start id, so strict '>' keeps the smallest-id tie
        if len(comp) > len(best):
            best = comp
    return best
