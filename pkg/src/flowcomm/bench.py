"""Synthetic graphs and a timing harness for the detection pipeline."""

from __future__ import annotations

import gc
import random
import statistics
import time
from dataclasses import dataclass

from .alpha import detect_alphas
from .graph import Graph
from .metrics import GroundTruth
from .propagate import PropagationConfig, propagate_labels

__all__ = [
    "BAConfig",
    "PipelineConfig",
    "PlantedPartitionConfig",
    "ba_edges",
    "generate_ba",
    "generate_planted",
    "time_scaling",
    "write_timings",
]


@dataclass(frozen=True)
class BAConfig:
    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class PlantedPartitionConfig:
    communities: int = 2
    size: int = 30
    p_in: float = 0.3
    p_out: float = 0.01
    weight_in: float = 1.0
    weight_out: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.communities < 2:
            raise ValueError("need at least two communities")
        if self.size < 2:
            raise ValueError("communities need at least two vertices")
        if not (0.0 < self.p_in <= 1.0 and 0.0 <= self.p_out < 1.0):
            raise ValueError("p_in must be in (0, 1] and p_out in [0, 1)")
        if not self.p_in > self.p_out:
            raise ValueError("p_in must exceed p_out")
        if self.weight_in < 1.0 or self.weight_out < 1.0:
            raise ValueError("weights must be >= 1")


def ba_edges(cfg: BAConfig) -> list[tuple[int, int]]:
    """Undirected preferential-attachment edges on vertices ``0..n-1``.

    Vertex ``m`` starts as the center of a star over ``0..m-1``; every later
    vertex attaches to ``m`` distinct earlier vertices drawn proportionally to
    degree.  The result has ``m * (n - m)`` edges.
    """
    rng = random.Random(cfg.seed)
    n, m = cfg.n, cfg.m
    edges = [(m, t) for t in range(m)]
    # every vertex appears once per incident edge
    repeated = list(range(m)) + [m] * m
    for src in range(m + 1, n):
        targets = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.random() * len(repeated))])
        for t in sorted(targets):
            edges.append((src, t))
            repeated.append(t)
        repeated.extend([src] * m)
    return edges


def generate_ba(cfg: BAConfig) -> Graph:
    """Barabási-Albert graph, each edge stored in both directions with weight 1."""
    return Graph.from_edges(ba_edges(cfg), directed=False)


def generate_planted(cfg: PlantedPartitionConfig) -> tuple[Graph, GroundTruth]:
    """Directed planted-partition graph and its planting as ground truth.

    Community ``c`` holds vertices ``c*size .. (c+1)*size - 1``.  Each ordered
    pair of distinct vertices gets an edge independently, with ``p_in`` and
    ``weight_in`` inside a community and ``p_out``/``weight_out`` across.
    """
    rng = random.Random(cfg.seed)
    n = cfg.communities * cfg.size
    size = cfg.size
    edges = []
    for u in range(n):
        cu = u // size
        for v in range(n):
            if u == v:
                continue
            if v // size == cu:
                if rng.random() < cfg.p_in:
                    edges.append((u, v, cfg.weight_in))
            elif rng.random() < cfg.p_out:
                edges.append((u, v, cfg.weight_out))
    g = Graph.from_edges(edges)
    g.vertices.update(range(n))
    truth = GroundTruth({c: range(c * size, (c + 1) * size) for c in range(cfg.communities)})
    return g, truth


@dataclass(frozen=True)
class PipelineConfig:
    """Detection settings for :func:`time_scaling`; ``m`` is the BA attachment count."""

    k_percent: float = 1.0
    beta: float = 0.25
    lam: int = 3
    seed: int = 0
    m: int = 5
    repeats: int = 1


def _time_once(edges, pipeline: PipelineConfig) -> tuple[int, float]:
    cfg = PropagationConfig(beta=pipeline.beta, lam=pipeline.lam, seed=pipeline.seed)
    gc_was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        start = time.perf_counter()
        g = Graph.from_edges(edges, directed=False)
        propagate_labels(g, detect_alphas(g, pipeline.k_percent), cfg)
        elapsed = time.perf_counter() - start
    finally:
        if gc_was_enabled:
            gc.enable()
    return g.edge_count, elapsed


def time_scaling(sizes, pipeline: PipelineConfig | None = None) -> list[tuple[int, float]]:
    """Wall-clock time of ingestion plus detection on BA graphs.

    Each target size is a stored (directed) edge count; the BA graph is sized
    so that ``2 * m * (n - m)`` matches it (rounded down).  Edges are generated
    in memory before the clock starts and one untimed warm-up run precedes the
    measurements.  Repeats cycle over all sizes in turn, so slow periods on a
    shared machine hit every size alike, and each size reports its median time.
    The median is used instead of the minimum because lucky cache-friendly
    runs skew the smallest sizes.
    """
    pipeline = pipeline or PipelineConfig()
    sizes = list(sizes)
    if not sizes:
        return []
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    m = pipeline.m
    inputs = [ba_edges(BAConfig(max(int(t) // (2 * m) + m, m + 1), m, pipeline.seed)) for t in sizes]
    _time_once(inputs[0], pipeline)
    samples: list[list[float]] = [[] for _ in sizes]
    counts = [0] * len(sizes)
    for _ in range(max(1, pipeline.repeats)):
        for i, edges in enumerate(inputs):
            counts[i], secs = _time_once(edges, pipeline)
            samples[i].append(secs)
    return list(zip(counts, map(statistics.median, samples)))


def write_timings(rows, fh) -> None:
    fh.write("#edges\tseconds\n")
    for edges, secs in rows:
        fh.write(f"{edges}\t{secs:.6f}\n")
