"""Label propagation by simulated information flow from alpha vertices.

Every labeled vertex on the frontier retries each of its still-unlabeled
out-edges once per outer iteration; an edge ``(u, v)`` fires with
probability ``(w_uv / weighted_out_degree(u)) ** beta``.  A vertex keeps the
first label it receives.  The run stops once every vertex is labeled, after
``lam`` consecutive iterations without any new label, or at a safety cap.
"""

from __future__ import annotations

import enum
import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

from .alpha import AlphaSet
from .graph import Graph

__all__ = [
    "Labeling",
    "PropagationConfig",
    "PropagationEvent",
    "Termination",
    "default_iteration_cap",
    "edge_probability",
    "expected_trials_oracle",
    "propagate_labels",
    "write_event_log",
]


@dataclass(frozen=True)
class PropagationConfig:
    beta: float = 0.25
    lam: int = 3
    seed: int = 0
    max_iterations: int | None = None
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.lam < 1:
            raise ValueError(f"lam must be >= 1, got {self.lam}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class Termination(str, enum.Enum):
    FULL_COVERAGE = "full_coverage"
    STABLE_STATE = "stable_state"
    CAP = "cap"


class PropagationEvent(NamedTuple):
    iteration: int
    src: int
    dst: int
    label: int
    probability: float


@dataclass
class Labeling:
    """Result of a propagation run.

    ``labels`` only holds labeled vertices.  ``parents[v]`` is the frontier
    vertex whose edge delivered ``v``'s label (alphas have no parent) and
    ``new_per_iteration[i]`` counts labels assigned in outer iteration
    ``i + 1``.
    """

    labels: dict[int, int]
    iterations_run: int
    terminated_by: Termination
    parents: dict[int, int] = field(default_factory=dict)
    new_per_iteration: list[int] = field(default_factory=list)
    events: list[PropagationEvent] | None = None

    def clusters(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for v, lab in self.labels.items():
            out.setdefault(lab, set()).add(v)
        return out


def edge_probability(w: float, delta_star: float, beta: float) -> float:
    """Chance that information crosses an edge of weight ``w`` in one trial.

    ``delta_star`` is the weighted out-degree of the edge's source.
    """
    if not (w > 0 and delta_star > 0):
        raise ValueError("weight and weighted out-degree must be positive")
    if w > delta_star:
        raise ValueError(f"edge weight {w} exceeds weighted out-degree {delta_star}")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return (w / delta_star) ** beta


def expected_trials_oracle(p: float, samples: int, seed: int = 0) -> float:
    """Mean number of Bernoulli(p) trials up to and including the first success.

    Draws come from the same generator type and comparison used by
    :func:`propagate_labels`, so agreement with ``1 / p`` checks that path.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if samples < 1:
        raise ValueError("samples must be positive")
    draw = random.Random(seed).random
    total = 0
    for _ in range(samples):
        n = 1
        while not draw() < p:
            n += 1
        total += n
    return total / samples


def default_iteration_cap(g: Graph, alphas, lam: int) -> int:
    """``10 * (estimated diameter + lam)``.

    The diameter is estimated by the depth of a multi-source breadth-first
    search from the alphas, i.e. the number of waves a certain flow would need.
    """
    seen = set(alphas)
    frontier = list(seen)
    depth = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.neighborhood(u)[0]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if nxt:
            depth += 1
        frontier = nxt
    return 10 * (depth + lam)


def _worker_rng(seed: int, worker: int, iteration: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{worker}:{iteration}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "little"))


class _SparseLabels(dict):
    """Label table for non-dense vertex ids; missing vertices read as -1."""

    def __missing__(self, key):
        return -1


def _label_table(g: Graph):
    top = max(g.vertices)
    if top < 2 * len(g.vertices) + 1024:
        return [-1] * (top + 1)
    return _SparseLabels()


def _sweep(chunk, adjacency, out_weight, pending, lab, beta, draw, write=False):
    """Run one iteration's trials for the frontier vertices in ``chunk``.

    -1 in ``lab`` marks an unlabeled vertex.  With ``write`` the claims are
    stored in ``lab`` as they happen, which is only safe for a single worker;
    otherwise ``lab`` is read-only.  Returns ``(claims, kept)``: claims are
    ``(v, label, u, p)`` in trial order and ``kept`` maps each still-active
    vertex to the neighbor indices it must retry next iteration.
    """
    claims = []
    kept = {}
    # claimed vertices are never in this iteration's chunk, so writing early is invisible to it
    local = frozenset() if write else set()
    for u in chunk:
        entry = adjacency.get(u)
        if entry is None:
            continue
        nbrs, wts = entry
        ds = out_weight[u]
        label = lab[u]
        idx = pending.get(u)
        if idx is None:
            idx = range(len(nbrs))
        keep = []
        for i in idx:
            v = nbrs[i]
            if lab[v] >= 0 or v in local:
                continue
            p = (wts[i] / ds) ** beta
            if draw() < p:
                if write:
                    lab[v] = label
                else:
                    local.add(v)
                claims.append((v, label, u, p))
            else:
                keep.append(i)
        if keep:
            kept[u] = keep
    return claims, kept


def propagate_labels(
    g: Graph,
    alphas,
    cfg: PropagationConfig | None = None,
    *,
    record_events: bool = False,
) -> Labeling:
    """Spread alpha labels over ``g`` until coverage, stability or the cap.

    The frontier is visited in ascending vertex id each iteration, so when
    two frontier vertices reach the same unlabeled vertex in one iteration
    the smaller id wins.  Vertices labeled during an iteration start
    spreading in the next one.

    Args:
        g: graph, read-only for the duration of the call.
        alphas: :class:`AlphaSet` or iterable of vertex ids; each seeds its
            own id as a label.
        cfg: propagation parameters.  With ``workers > 1`` the frontier is
            split into that many contiguous chunks per iteration, each with
            its own random stream; conflicting claims on one vertex are
            resolved at the iteration barrier in chunk order.
        record_events: keep one :class:`PropagationEvent` per new label.

    Raises:
        ValueError: the alpha set is empty or names a vertex not in ``g``.
    """
    cfg = cfg or PropagationConfig()
    seeds = list(alphas.alphas if isinstance(alphas, AlphaSet) else alphas)
    if not seeds:
        raise ValueError("alpha set is empty")
    missing = [a for a in seeds if a not in g.vertices]
    if missing:
        raise ValueError(f"alpha vertices not in graph: {missing[:10]}")
    seeds = sorted(set(seeds))

    # the default cap is at least 10 * lam, so its graph walk waits until a run gets that far
    cap = cfg.max_iterations
    cap_floor = cap or 10 * cfg.lam
    adjacency = g.adjacency
    out_weight = g._out_weight
    beta = cfg.beta
    n_vertices = len(g.vertices)

    lab = _label_table(g)
    for a in seeds:
        lab[a] = a
    n_labeled = len(seeds)
    parents: dict[int, int] = {}
    events = [] if record_events else None
    progress: list[int] = []
    pending: dict[int, list[int]] = {}
    frontier = seeds
    rng = random.Random(cfg.seed)
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None

    idle = 0
    iteration = 0
    reason = Termination.CAP
    try:
        while True:
            if n_labeled == n_vertices:
                reason = Termination.FULL_COVERAGE
                break
            if iteration >= cap_floor:
                if cap is None:
                    cap = cap_floor = default_iteration_cap(g, seeds, cfg.lam)
                if iteration >= cap:
                    reason = Termination.CAP
                    break
            iteration += 1
            if pool is None:
                results = [_sweep(frontier, adjacency, out_weight, pending, lab, beta, rng.random, True)]
            else:
                size = -(-len(frontier) // cfg.workers) or 1
                chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
                futures = [
                    pool.submit(
                        _sweep, chunk, adjacency, out_weight, pending, lab, beta,
                        _worker_rng(cfg.seed, w, iteration).random,
                    )
                    for w, chunk in enumerate(chunks)
                ]
                results = [f.result() for f in futures]

            # barrier: claims land in frontier order, first claim wins
            new = []
            next_pending = {}
            for claims, kept in results:
                next_pending.update(kept)
                for v, label, u, p in claims:
                    if pool is not None:
                        if lab[v] >= 0:
                            continue
                        lab[v] = label
                    parents[v] = u
                    new.append(v)
                    if events is not None:
                        events.append(PropagationEvent(iteration, u, v, label, p))
            pending = next_pending
            n_labeled += len(new)
            progress.append(len(new))
            # two sorted runs; timsort merges them in linear time
            new.sort()
            frontier = [u for u in frontier if u in pending]
            frontier.extend(new)
            frontier.sort()
            if new:
                idle = 0
            else:
                idle += 1
                if idle >= cfg.lam:
                    reason = Termination.STABLE_STATE
                    break
    finally:
        if pool is not None:
            pool.shutdown()

    if isinstance(lab, list):
        labels = {v: label for v, label in enumerate(lab) if label >= 0}
    else:
        labels = dict(sorted(lab.items()))
    if len(labels) == n_vertices:
        reason = Termination.FULL_COVERAGE
    return Labeling(labels, iteration, reason, parents, progress, events)


def write_event_log(events, path) -> None:
    """Tab-separated ``iteration src dst label probability`` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#iteration\tsrc\tdst\tlabel\tprobability\n")
        for e in events:
            fh.write(f"{e.iteration}\t{e.src}\t{e.dst}\t{e.label}\t{e.probability!r}\n")
