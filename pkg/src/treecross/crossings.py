"""Crossings of a labelled tree drawn in convex position.

Convex position is treated purely combinatorially: vertex i sits at
position i on a circle, edges are chords, and two chords {u,v}, {x,y}
cross iff their endpoints strictly interleave around the circle
(u < x < v < y or x < u < y < v after normalizing u < v, x < y).  Chords
sharing an endpoint never cross.

Each potential crossing is named by the sorted 4-tuple a < b < c < d of
the endpoints involved; the tree has a crossing there iff both {a,c} and
{b,d} are edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .trees import LabeledTree


@dataclass(frozen=True, order=True)
class CrossingIndex:
    """A potential crossing site: vertices a < b < c < d."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if not (1 <= self.a < self.b < self.c < self.d):
            raise ValueError(f"need 1 <= a < b < c < d, got {(self.a, self.b, self.c, self.d)}")

    @property
    def vertices(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def disjoint_from(self, other: "CrossingIndex") -> bool:
        return not (set(self.vertices) & set(other.vertices))


def has_crossing_at(t: LabeledTree, j: CrossingIndex) -> bool:
    """True iff both chords {a,c} and {b,d} are edges of t."""
    if j.d > t.n:
        raise ValueError(f"index {j.vertices} outside 1..{t.n}")
    return t.has_edge(j.a, j.c) and t.has_edge(j.b, j.d)


def count_crossings_naive(t: LabeledTree) -> int:
    """Crossing count via the O(n^2) pairwise interleaving test."""
    arr = t.edge_array
    return int(_kernels.count_crossings_pairwise(arr[:, 0], arr[:, 1]))


def count_crossings_fast(t: LabeledTree) -> int:
    """Crossing count in O(n log n): left-endpoint sweep with a Fenwick
    index over right endpoints.  Always equals the naive counter."""
    arr = t.edge_array
    return int(_kernels.count_crossings_fenwick(arr[:, 0], arr[:, 1], t.n))


def list_crossings(t: LabeledTree) -> set[CrossingIndex]:
    """All indices at which t has a crossing; size equals the counters."""
    edges = sorted(t.edges)
    out: set[CrossingIndex] = set()
    for i in range(len(edges)):
        u, v = edges[i]
        for k in range(i + 1, len(edges)):
            x, y = edges[k]
            if u < x < v < y:
                out.add(CrossingIndex(u, x, v, y))
            elif x < u < y < v:
                out.add(CrossingIndex(x, u, y, v))
    return out
