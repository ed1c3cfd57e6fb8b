"""Exact rational statistics of the crossing count, with enumeration oracles.

All closed forms are evaluated in exact rational arithmetic
(``fractions.Fraction``); the small-n formulas have large cancellations,
so float-only evaluation could not be tested for exact equality against
the exhaustive-enumeration oracles below.  Float projections are provided
only where large-n asymptotics are wanted.

Conventions: an isolated vertex is a forest component of size 1 and
contributes a factor 1, so callers pass only non-trivial components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import GuardError, InvalidTreeError
from .trees import ENUMERATION_MAX_N, EdgeLike, is_acyclic

FULL_MOMENTS_MAX_N = 7  # 7^5 = 16807 trees; hard guard for moment oracles

Rational = Fraction  # carrier type for every exact probability in the package


@dataclass(frozen=True)
class ExactMoments:
    """Exact mean and variance of the crossing count at a given n."""

    n: int
    mean: Fraction
    variance: Fraction


def tree_count(n: int) -> int:
    """Number of labelled trees on n vertices (Cayley)."""
    if n < 1:
        raise GuardError("n >= 1 required")
    return 1 if n <= 2 else n ** (n - 2)


def forest_probability(n: int, components: Sequence[Iterable[EdgeLike]]) -> Fraction:
    """Probability that a uniform labelled tree on 1..n contains the forest.

    The forest is given as its non-trivial components (edge lists); the
    probability is (prod of component sizes) / n^(total edge count).
    Components must be pairwise vertex-disjoint trees inside 1..n.
    """
    if n < 2:
        raise GuardError("n >= 2 required")
    seen: set[int] = set()
    sizes: list[int] = []
    total_edges = 0
    for edges in components:
        edges = [(min(e), max(e)) for e in edges]
        verts = {v for e in edges for v in e}
        if not edges:
            raise InvalidTreeError("empty component; isolated vertices are implicit")
        for u, v in edges:
            if u == v:
                raise InvalidTreeError("self-loop in forest component")
            if not (1 <= u and v <= n):
                raise InvalidTreeError(f"component vertex outside 1..{n}")
        if len(set(edges)) != len(edges):
            raise InvalidTreeError("duplicate edge in forest component")
        if len(edges) != len(verts) - 1 or not is_acyclic(n, edges):
            raise InvalidTreeError("forest component is not a tree")
        # connectivity on the induced vertex set
        sub = {v: [] for v in verts}
        for u, v in edges:
            sub[u].append(v)
            sub[v].append(u)
        stack = [next(iter(verts))]
        reached = {stack[0]}
        while stack:
            x = stack.pop()
            for y in sub[x]:
                if y not in reached:
                    reached.add(y)
                    stack.append(y)
        if reached != verts:
            raise InvalidTreeError("forest component is not connected")
        if seen & verts:
            raise InvalidTreeError("forest components overlap")
        seen |= verts
        sizes.append(len(verts))
        total_edges += len(edges)
    num = 1
    for s in sizes:
        num *= s
    return Fraction(num, n**total_edges)


def edge_probability(n: int) -> Fraction:
    """Probability that a fixed pair {u, v} is an edge: 2/n."""
    if n < 2:
        raise GuardError("n >= 2 required")
    return Fraction(2, n)


def exact_mean(n: int) -> Fraction:
    """Exact expected crossing count: (n-1)(n-2)(n-3) / (6n).

    Equals C(n,4) * 4/n^2 (each of the C(n,4) sites holds a crossing with
    probability 4/n^2); zero for n < 4.
    """
    if n < 1:
        raise GuardError("n >= 1 required")
    return Fraction((n - 1) * (n - 2) * (n - 3), 6 * n)


def exact_variance(n: int) -> Fraction:
    """Exact variance of the crossing count (closed form, ~ n^3/45)."""
    if n < 4:
        raise GuardError(f"variance formula needs n >= 4, got {n}")
    n_ = Fraction(n)
    return (
        n_**3 / 45
        - 3 * n_**2 / 40
        - 17 * n_ / 72
        + Fraction(35, 24)
        - Fraction(1003, 360) / n_
        + Fraction(157, 60) / n_**2
        - 1 / n_**3
    )


def neighborhood_size(n: int) -> int:
    """Number of crossing sites sharing at least one vertex with a fixed
    site: C(n,4) - C(n-4,4) = (2/3)n^3 - 7n^2 + (79/3)n - 35."""
    if n < 4:
        raise GuardError(f"n >= 4 required, got {n}")
    return comb(n, 4) - comb(n - 4, 4)


def enumeration_crossing_counts(n: int) -> np.ndarray:
    """Crossing count of every tree, lexicographic Prüfer order (guarded)."""
    if not 2 <= n <= ENUMERATION_MAX_N:
        raise GuardError(f"enumeration guarded to 2 <= n <= {ENUMERATION_MAX_N}, got {n}")
    return _kernels.enumerate_crossing_counts(n)


def enumeration_law(n: int) -> dict[int, Fraction]:
    """Exact law of the crossing count over all n^(n-2) trees."""
    counts = enumeration_crossing_counts(n)
    total = tree_count(n)
    values, reps = np.unique(counts, return_counts=True)
    return {int(k): Fraction(int(r), total) for k, r in zip(values, reps)}


def enumeration_moments(n: int) -> ExactMoments:
    """Exact mean/variance by exhaustive enumeration (oracle, 4 <= n <= 7)."""
    if not 4 <= n <= FULL_MOMENTS_MAX_N:
        raise GuardError(f"moment oracle guarded to 4 <= n <= {FULL_MOMENTS_MAX_N}, got {n}")
    counts = enumeration_crossing_counts(n)
    total = tree_count(n)
    s1 = int(counts.sum())
    s2 = int((counts * counts).sum())
    mean = Fraction(s1, total)
    var = Fraction(s2, total) - mean * mean
    return ExactMoments(n=n, mean=mean, variance=var)


def forest_containment_count(n: int, forest: Iterable[EdgeLike]) -> int:
    """Number of trees containing every given edge (exhaustive, guarded)."""
    if not 2 <= n <= ENUMERATION_MAX_N:
        raise GuardError(f"enumeration guarded to 2 <= n <= {ENUMERATION_MAX_N}, got {n}")
    pairs = [(min(e), max(e)) for e in forest]
    if not pairs:
        return tree_count(n)
    pu = np.array([p[0] for p in pairs], dtype=np.int64)
    pv = np.array([p[1] for p in pairs], dtype=np.int64)
    if pu.min() < 1 or pv.max() > n:
        raise ValueError(f"forest edge outside 1..{n}")
    _, flags = _kernels.enumerate_counts_and_containment(n, pu, pv, True)
    return int(flags.sum())


def forest_containment_probability(n: int, forest: Iterable[EdgeLike]) -> Fraction:
    """Exact containment frequency over all trees (enumeration oracle for
    :func:`forest_probability`)."""
    return Fraction(forest_containment_count(n, forest), tree_count(n))
