"""Alpha (influencer) selection by joint out-degree and weighted out-degree rank."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import Graph

__all__ = ["AlphaSet", "EmptyAlphaSet", "detect_alphas", "truncation_count"]


class EmptyAlphaSet(Exception):
    """No vertex ranks in the top slots of both degree orderings.

    Attributes:
        by_degree: truncated ranking by out-degree.
        by_weight: truncated ranking by weighted out-degree.
    """

    def __init__(self, k_percent, by_degree, by_weight):
        self.k_percent = k_percent
        self.by_degree = list(by_degree)
        self.by_weight = list(by_weight)
        super().__init__(
            f"no alpha vertices at k={k_percent}%: top-by-degree {self.by_degree[:10]} "
            f"and top-by-weight {self.by_weight[:10]} are disjoint; retry with a larger k"
        )


@dataclass(frozen=True)
class AlphaSet:
    alphas: tuple[int, ...]
    k_percent: float

    def __iter__(self):
        return iter(self.alphas)

    def __len__(self):
        return len(self.alphas)

    def __contains__(self, u):
        return u in self.alphas


def truncation_count(n_vertices: int, k_percent: float) -> int:
    # ceil(k% of |V|); the product is rounded first so 20% of 5 gives 1, not 2
    return math.ceil(round(k_percent * n_vertices / 100.0, 9))


def detect_alphas(g: Graph, k_percent: float) -> AlphaSet:
    """Intersect the top ``k_percent`` of vertices by out-degree and by weight.

    Both rankings are descending with ties broken by ascending vertex id, and
    both are truncated to ``ceil(k_percent / 100 * |V|)`` entries.  Vertices
    without outgoing edges never qualify.

    Raises:
        ValueError: ``k_percent`` is outside ``(0, 100]`` or ``g`` is empty.
        EmptyAlphaSet: the two truncated rankings do not intersect.
    """
    if not 0.0 < k_percent <= 100.0:
        raise ValueError(f"k_percent must be in (0, 100], got {k_percent}")
    if not g.vertices:
        raise ValueError("cannot detect alphas on an empty graph")
    top = truncation_count(len(g.vertices), k_percent)
    # vertices with no out-edges sort last in both orders, so ranking the
    # table keys and padding is equivalent to ranking all of V
    sources = sorted(g.adjacency)
    by_degree = sorted(sources, key=lambda u: -len(g.adjacency[u][0]))[:top]
    by_weight = sorted(sources, key=lambda u: -g.weighted_out_degree(u))[:top]
    chosen = set(by_degree).intersection(by_weight)
    if not chosen:
        raise EmptyAlphaSet(k_percent, by_degree, by_weight)
    return AlphaSet(tuple(sorted(chosen)), float(k_percent))
