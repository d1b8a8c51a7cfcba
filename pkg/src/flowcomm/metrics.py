"""Cluster quality: directed conductance and sampled pair error rates."""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from pathlib import Path
from typing import Iterable, Mapping

from .graph import Graph

__all__ = [
    "Cluster",
    "Clustering",
    "ConductanceProfile",
    "EvalReport",
    "GroundTruth",
    "NoPairsError",
    "SamplingConfig",
    "biased_sample_pair_rates",
    "conductance",
    "conductance_counts",
    "conductance_profile",
    "load_ground_truth",
    "pair_verdict",
    "sample_pair_rates",
]


class NoPairsError(ValueError):
    """The clustering offers no pairs of the kind a sampler needs."""


# -- data types --------------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    label: int | None
    members: frozenset
    dormant: bool = False

    def __len__(self):
        return len(self.members)


class Clustering:
    """Partition of a vertex set into predicted clusters.

    Unlabeled vertices become singleton clusters with ``label=None`` and
    ``dormant=True``.  Labeled clusters come first in ascending label order,
    then dormant singletons in ascending vertex order.
    """

    def __init__(self, clusters: list[Cluster]):
        self.clusters = clusters
        self.index: dict[int, int] = {}
        for i, c in enumerate(clusters):
            for v in c.members:
                if v in self.index:
                    raise ValueError(f"vertex {v} appears in more than one cluster")
                self.index[v] = i

    @classmethod
    def from_labels(cls, labels: Mapping[int, int], vertices: Iterable[int] | None = None) -> "Clustering":
        groups: dict[int, set[int]] = {}
        for v, lab in labels.items():
            groups.setdefault(lab, set()).add(v)
        clusters = [Cluster(lab, frozenset(groups[lab])) for lab in sorted(groups)]
        if vertices is not None:
            dormant = sorted(set(vertices).difference(labels))
            clusters.extend(Cluster(None, frozenset((v,)), True) for v in dormant)
        return cls(clusters)

    @classmethod
    def from_labeling(cls, labeling, g: Graph) -> "Clustering":
        return cls.from_labels(labeling.labels, g.vertices)

    def cluster_of(self, v: int) -> Cluster:
        return self.clusters[self.index[v]]

    def same(self, u: int, v: int) -> bool:
        return self.index[u] == self.index[v]

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)


class GroundTruth:
    """Overlapping reference communities.

    ``communities`` maps a community id to its vertices and ``memberships``
    is the inverse map from a vertex to the ids containing it.
    """

    def __init__(self, communities: Mapping[int, Iterable[int]]):
        self.communities = {cid: frozenset(vs) for cid, vs in communities.items()}
        members: dict[int, set[int]] = {}
        for cid, vs in self.communities.items():
            for v in vs:
                members.setdefault(v, set()).add(cid)
        self.memberships = {v: frozenset(c) for v, c in members.items()}

    @classmethod
    def from_lists(cls, communities: Iterable[Iterable[int]]) -> "GroundTruth":
        return cls(dict(enumerate(communities)))

    def __contains__(self, v):
        return v in self.memberships

    def share(self, u: int, v: int) -> bool:
        return not self.memberships[u].isdisjoint(self.memberships[v])


def load_ground_truth(path) -> GroundTruth:
    """One community per line, whitespace-separated vertex ids.

    Community ids are 0-based line indices over non-blank, non-comment lines.
    """
    comms = []
    with open(Path(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(("#", "%")):
                continue
            try:
                comms.append([int(x) for x in line.replace(",", " ").split()])
            except ValueError:
                raise ValueError(f"line {lineno}: ground-truth ids must be integers") from None
    return GroundTruth.from_lists(comms)


def write_ground_truth(truth: GroundTruth, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        for cid in sorted(truth.communities):
            fh.write(" ".join(map(str, sorted(truth.communities[cid]))) + "\n")


# -- conductance -------------------------------------------------------------


def conductance_counts(g: Graph, s, *, symmetric: bool = False) -> tuple[int, int]:
    """Return ``(boundary, internal)`` edge counts of vertex set ``s``.

    Boundary edges leave ``s`` (source inside, target outside).  With
    ``symmetric=True`` the graph is read as undirected: each unordered
    adjacent pair counts once and incoming crossings count as boundary.
    """
    s = s if isinstance(s, (set, frozenset)) else set(s)
    if not symmetric:
        cut = inner = 0
        for u in s:
            for v in g.neighborhood(u)[0]:
                if v in s:
                    inner += 1
                else:
                    cut += 1
        return cut, inner
    cut_pairs = set()
    inner_pairs = set()
    for u, (nbrs, _) in g.adjacency.items():
        u_in = u in s
        for v in nbrs:
            v_in = v in s
            if u_in and v_in:
                inner_pairs.add((min(u, v), max(u, v)))
            elif u_in or v_in:
                cut_pairs.add((min(u, v), max(u, v)))
    return len(cut_pairs), len(inner_pairs)


def conductance(g: Graph, s, *, symmetric: bool = False) -> float:
    """``cut / (2 * internal + cut)`` for vertex set ``s``; 0.0 when both are 0.

    Raises:
        ValueError: ``s`` is empty or holds vertices not in ``g``.
    """
    s = set(s)
    if not s:
        raise ValueError("conductance of an empty set is undefined")
    unknown = s - g.vertices
    if unknown:
        raise ValueError(f"vertices not in graph: {sorted(unknown)[:10]}")
    cut, inner = conductance_counts(g, s, symmetric=symmetric)
    denom = 2 * inner + cut
    return cut / denom if denom else 0.0


@dataclass
class ProfileEntry:
    label: int | None
    size: int
    conductance: float
    dormant: bool


@dataclass
class ConductanceProfile:
    entries: list[ProfileEntry]

    def to_tsv(self) -> str:
        lines = ["#label\tsize\tconductance\tdormant"]
        for e in self.entries:
            label = "-" if e.label is None else str(e.label)
            lines.append(f"{label}\t{e.size}\t{e.conductance!r}\t{int(e.dormant)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "kind": "conductance_profile",
            "entries": [
                {"label": e.label, "size": e.size, "conductance": e.conductance, "dormant": e.dormant}
                for e in self.entries
            ],
        }


def conductance_profile(g: Graph, clustering: Clustering, *, symmetric: bool = False) -> ConductanceProfile:
    """Conductance of every cluster, largest first; dormant singletons flagged."""
    entries = []
    for i, c in enumerate(clustering):
        entries.append((i, ProfileEntry(c.label, len(c), conductance(g, c.members, symmetric=symmetric), c.dormant)))
    entries.sort(key=lambda t: (-t[1].size, t[0]))
    return ConductanceProfile([e for _, e in entries])


# -- pair sampling -----------------------------------------------------------


@dataclass(frozen=True)
class SamplingConfig:
    """``batch`` pairs per checkpoint, half positive and half negative."""

    batch: int = 10_000
    epsilon: float = 0.005
    window: int = 5
    max_samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.batch < 2:
            raise ValueError("batch must hold at least one pair of each kind")
        if self.window < 2:
            raise ValueError("window must span at least two checkpoints")


@dataclass
class EvalReport:
    fp_rate: float
    fn_rate: float
    samples_drawn: int
    converged: bool
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    skipped: int = 0
    positives: int = 0
    negatives: int = 0
    biased: bool = False

    def to_tsv(self) -> str:
        head = [
            f"#fp_rate\t{self.fp_rate!r}",
            f"#fn_rate\t{self.fn_rate!r}",
            f"#samples_drawn\t{self.samples_drawn}",
            f"#converged\t{int(self.converged)}",
            f"#skipped\t{self.skipped}",
            f"#biased\t{int(self.biased)}",
            "samples\tfp_rate\tfn_rate",
        ]
        rows = [f"{n}\t{fp!r}\t{fn!r}" for n, fp, fn in self.trace]
        return "\n".join(head + rows) + "\n"

    def to_dict(self) -> dict:
        return {
            "kind": "pair_rates",
            "fp_rate": self.fp_rate,
            "fn_rate": self.fn_rate,
            "samples_drawn": self.samples_drawn,
            "converged": self.converged,
            "skipped": self.skipped,
            "positives": self.positives,
            "negatives": self.negatives,
            "biased": self.biased,
            "trace": [list(t) for t in self.trace],
        }


def pair_verdict(clustering: Clustering, truth: GroundTruth, u: int, v: int) -> str | None:
    """Classify pair ``{u, v}`` as ``"tp"``, ``"fp"``, ``"tn"`` or ``"fn"``.

    Returns ``None`` if either vertex is absent from the ground truth.  Two
    vertices agree with the truth when they share any reference community.
    """
    if u not in truth or v not in truth:
        return None
    together = truth.share(u, v)
    if clustering.same(u, v):
        return "tp" if together else "fp"
    return "fn" if together else "tn"


class PairSampler:
    """Uniform draws of same-cluster and cross-cluster vertex pairs.

    Positive pairs are uniform over same-cluster pairs inside the clusters
    listed in ``positive_pool``.  Negative pairs are uniform over
    cross-cluster pairs with at least one endpoint in ``negative_pool``.
    Both pools default to every cluster.
    """

    def __init__(self, clustering: Clustering, rng: random.Random, positive_pool=None, negative_pool=None):
        self.rng = rng
        self.clustering = clustering
        n_clusters = len(clustering)
        self._order = []
        self._start = []
        for c in clustering:
            self._start.append(len(self._order))
            self._order.extend(sorted(c.members))
        self._sizes = [len(c) for c in clustering]
        self.n = len(self._order)

        pos = list(range(n_clusters)) if positive_pool is None else list(positive_pool)
        self._pos = [i for i in pos if self._sizes[i] >= 2]
        self._pos_cum = list(accumulate(self._sizes[i] * (self._sizes[i] - 1) // 2 for i in self._pos))

        neg = list(range(n_clusters)) if negative_pool is None else list(negative_pool)
        self._neg_set = set(neg)
        self._neg = [i for i in neg if self._sizes[i] < self.n]
        self._neg_cum = list(accumulate(self._sizes[i] * (self.n - self._sizes[i]) for i in self._neg))

    @property
    def has_positive(self) -> bool:
        return bool(self._pos_cum) and self._pos_cum[-1] > 0

    @property
    def has_negative(self) -> bool:
        return bool(self._neg_cum) and self._neg_cum[-1] > 0

    def _pick(self, pool, cum):
        r = self.rng.random() * cum[-1]
        return pool[min(bisect_right(cum, r), len(pool) - 1)]

    def positive(self) -> tuple[int, int]:
        c = self._pick(self._pos, self._pos_cum)
        size, start = self._sizes[c], self._start[c]
        i = self.rng.randrange(size)
        j = self.rng.randrange(size - 1)
        if j >= i:
            j += 1
        return self._order[start + i], self._order[start + j]

    def negative(self) -> tuple[int, int]:
        rng = self.rng
        while True:
            c = self._pick(self._neg, self._neg_cum)
            size, start = self._sizes[c], self._start[c]
            u = self._order[start + rng.randrange(size)]
            r = rng.randrange(self.n - size)
            if r >= start:
                r += size
            v = self._order[r]
            # pairs with both endpoints in the pool are reachable from either side
            if self.clustering.index[v] in self._neg_set and rng.random() >= 0.5:
                continue
            return u, v


def _run_sampler(sampler: PairSampler, clustering, truth, cfg: SamplingConfig, biased: bool) -> EvalReport:
    if not sampler.has_positive:
        raise NoPairsError("no same-cluster pairs to sample (every cluster is a singleton)")
    if not sampler.has_negative:
        raise NoPairsError("no cross-cluster pairs to sample (a single cluster covers everything)")
    half = cfg.batch // 2
    fp = fn = pos = neg = skipped = drawn = 0
    trace: list[tuple[int, float, float]] = []
    converged = False
    while drawn < cfg.max_samples:
        for _ in range(half):
            u, v = sampler.positive()
            verdict = pair_verdict(clustering, truth, u, v)
            if verdict is None:
                skipped += 1
            else:
                pos += 1
                fp += verdict == "fp"
        for _ in range(half):
            u, v = sampler.negative()
            verdict = pair_verdict(clustering, truth, u, v)
            if verdict is None:
                skipped += 1
            else:
                neg += 1
                fn += verdict == "fn"
        drawn += 2 * half
        trace.append((drawn, fp / pos if pos else 0.0, fn / neg if neg else 0.0))
        if len(trace) >= cfg.window and pos and neg:
            recent = trace[-cfg.window:]
            fps = [t[1] for t in recent]
            fns = [t[2] for t in recent]
            if max(fps) - min(fps) < cfg.epsilon and max(fns) - min(fns) < cfg.epsilon:
                converged = True
                break
    _, fp_rate, fn_rate = trace[-1]
    return EvalReport(fp_rate, fn_rate, drawn, converged, trace, skipped, pos, neg, biased)


def sample_pair_rates(clustering: Clustering, truth: GroundTruth, cfg: SamplingConfig | None = None) -> EvalReport:
    """Estimate false-positive and false-negative rates by pair sampling.

    Each batch holds equally many uniformly drawn same-cluster (positive)
    and cross-cluster (negative) pairs.  The false-positive rate is the
    fraction of counted positive pairs sharing no reference community; the
    false-negative rate is the fraction of counted negative pairs sharing
    one.  Pairs touching a vertex missing from ``truth`` are tallied in
    ``skipped``.  Sampling stops once both running rates stay within
    ``epsilon`` over the last ``window`` checkpoints, or at ``max_samples``.

    Raises:
        NoPairsError: no positive or no negative pair can be drawn.
    """
    cfg = cfg or SamplingConfig()
    sampler = PairSampler(clustering, random.Random(cfg.seed))
    return _run_sampler(sampler, clustering, truth, cfg, biased=False)


def biased_sample_pair_rates(
    clustering: Clustering,
    truth: GroundTruth,
    top_fraction: float,
    cfg: SamplingConfig | None = None,
) -> EvalReport:
    """Pair sampling focused on the largest predicted clusters.

    Positive pairs come only from the ``ceil(top_fraction * K)`` largest of
    the ``K`` clusters, and every negative pair has an endpoint in the
    ``ceil(top_fraction * K)`` smallest (dormant singletons sort first among
    equals).  ``top_fraction=1.0`` draws exactly what :func:`sample_pair_rates`
    draws for the same seed.
    """
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError(f"top_fraction must be in (0, 1], got {top_fraction}")
    cfg = cfg or SamplingConfig()
    k = len(clustering)
    take = max(1, math.ceil(round(top_fraction * k, 9)))
    ranked = sorted(range(k), key=lambda i: (-len(clustering.clusters[i]), i))
    smallest = sorted(range(k), key=lambda i: (len(clustering.clusters[i]), not clustering.clusters[i].dormant, i))
    if take >= k:
        sampler = PairSampler(clustering, random.Random(cfg.seed))
    else:
        sampler = PairSampler(clustering, random.Random(cfg.seed), ranked[:take], smallest[:take])
    return _run_sampler(sampler, clustering, truth, cfg, biased=True)
