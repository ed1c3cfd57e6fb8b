"""Size-bias transform of the crossing count.

A random variable X^s has the size-bias distribution of X >= 0 with mean
mu when E[X f(X)] = mu E[f(X^s)] for all f; for a crossing count (a sum
of exchangeable-probability Bernoulli indicators, one per 4-vertex site)
this is realized by picking a site I uniformly and conditioning the tree
to have a crossing there.

Two samplers are provided:

* the explicit constructive coupling: starting from a uniform tree T,
  force the chord {a,c} by adding it and deleting one end of its cycle
  path at random, then do the same for {b,d}.  The result always has the
  crossing, and at most 2 edges were added and 2 deleted, so
  |X^s - X| <= 4(n-3) holds surely.

* the rejection sampler: redraw the tree until it has the crossing at I.
  Its marginal law is the conditional law by definition, so the size-bias
  identity is guaranteed; the outcome records the accepted tree (the
  record is degenerate, x == x_s).

Exact small-n oracles (full enumeration over trees, sites, and deletion
branches) pin both samplers down, including the exact total-variation
distance between the constructive coupling's marginal and the true
size-bias law, and the exact conditional variance of the coupling
increment used in the normal-approximation bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, Mapping

import numpy as np

from . import _kernels
from .crossings import CrossingIndex, count_crossings_fast, count_crossings_naive, has_crossing_at
from .errors import GuardError, RetryLimitError
from .exact import enumeration_law, tree_count
from .rng import normalize_seed
from .trees import LabeledTree, enumerate_trees, sample_uniform_tree

COUPLING_EXACT_MAX_N = 6  # trees x sites x branches blows up past this
REJECTION_RETRY_CAP = 10**7  # expected retries ~ n^2/4; a cap hit is a bug
_BATCH_WORKERS = 64  # fixed logical split, independent of thread count


def coupling_bound(n: int) -> int:
    """Sure bound on |x_s - x|: 4(n-3) (each edge change moves the count
    by at most n-3)."""
    return 4 * (n - 3)


@dataclass(frozen=True)
class CouplingOutcome:
    """One realized coupling (tree, site, biased tree, both counts)."""

    tree: LabeledTree
    index: CrossingIndex
    biased_tree: LabeledTree
    x: int
    x_s: int
    retries: int | None = None  # rejection mode only

    def __post_init__(self):
        if not has_crossing_at(self.biased_tree, self.index):
            raise ValueError("biased tree lacks the requested crossing")
        if abs(self.x_s - self.x) > coupling_bound(self.tree.n):
            raise ValueError(
                f"|x_s - x| = {abs(self.x_s - self.x)} exceeds 4(n-3) = {coupling_bound(self.tree.n)}"
            )


@dataclass(frozen=True)
class SizeBiasLaw:
    """Exact pmf on crossing-count values, probabilities as fractions."""

    n: int
    pmf: dict[int, Fraction]

    def total_mass(self) -> Fraction:
        return sum(self.pmf.values(), Fraction(0))

    def mean(self) -> Fraction:
        return sum((Fraction(k) * p for k, p in self.pmf.items()), Fraction(0))


def tv_distance(p: Mapping[int, Fraction], q: Mapping[int, Fraction]) -> Fraction:
    """Exact total-variation distance between two pmfs."""
    keys = set(p) | set(q)
    return sum((abs(p.get(k, Fraction(0)) - q.get(k, Fraction(0))) for k in keys), Fraction(0)) / 2


# ---------------------------------------------------------------------------
# the constructive coupling
# ---------------------------------------------------------------------------


def _rewire_branches(t: LabeledTree, u: int, v: int) -> list[tuple[LabeledTree, Fraction]]:
    """The possible outcomes of forcing chord {u,v}, with probabilities.

    When the chord already exists the operation is the identity (the
    target property already holds).  Otherwise the chord closes a cycle
    with the u..v path and one of the two path edges incident to u or to
    v is deleted, each with probability 1/2; branch 0 deletes at u,
    branch 1 deletes at v.
    """
    if u == v:
        raise ValueError("chord endpoints must differ")
    if t.has_edge(u, v):
        return [(t, Fraction(1))]
    path = t.path(u, v)
    first = (path[0], path[1])
    last = (path[-2], path[-1])
    return [
        (t.replace_edge(first, (u, v)), Fraction(1, 2)),
        (t.replace_edge(last, (u, v)), Fraction(1, 2)),
    ]


def rewire_pair(t: LabeledTree, u: int, v: int, rng: np.random.Generator) -> LabeledTree:
    """Force chord {u,v}: identity if present, else add it and delete one
    of the two cycle-path edges at u or v with equal probability.

    Consumes randomness only in the non-degenerate case.
    """
    branches = _rewire_branches(t, u, v)
    if len(branches) == 1:
        return branches[0][0]
    return branches[int(rng.integers(0, 2))][0]


def _construct_branches(t: LabeledTree, j: CrossingIndex) -> Iterator[tuple[LabeledTree, Fraction]]:
    """All deletion branches of the construction, with probabilities."""
    if has_crossing_at(t, j):
        yield t, Fraction(1)
        return
    for t1, w1 in _rewire_branches(t, j.a, j.c):
        for t2, w2 in _rewire_branches(t1, j.b, j.d):
            yield t2, w1 * w2


def construct_biased_tree(t: LabeledTree, j: CrossingIndex, rng: np.random.Generator) -> LabeledTree:
    """Force a crossing at j: rewire (a,c), then (b,d) on the result.

    The second rewiring deletes an edge incident to b or d only, so it
    can never remove the freshly placed {a,c}; both chords are asserted
    present on return.
    """
    if has_crossing_at(t, j):
        return t
    t1 = rewire_pair(t, j.a, j.c, rng)
    t2 = rewire_pair(t1, j.b, j.d, rng)
    if not t2.has_edge(j.a, j.c) or not has_crossing_at(t2, j):
        raise AssertionError("rewiring destroyed the forced crossing")
    return t2


def _uniform_index(n: int, rng: np.random.Generator) -> CrossingIndex:
    verts = np.sort(rng.choice(n, size=4, replace=False) + 1)
    return CrossingIndex(*(int(v) for v in verts))


def sample_coupling(n: int, rng: np.random.Generator) -> CouplingOutcome:
    """One constructive coupling: T uniform, site I uniform and
    independent of T, T^s forced to cross at I."""
    if n < 4:
        raise GuardError(f"couplings need n >= 4, got {n}")
    t = sample_uniform_tree(n, rng)
    j = _uniform_index(n, rng)
    ts = construct_biased_tree(t, j, rng)
    return CouplingOutcome(
        tree=t, index=j, biased_tree=ts, x=count_crossings_fast(t), x_s=count_crossings_fast(ts)
    )


# ---------------------------------------------------------------------------
# the rejection sampler
# ---------------------------------------------------------------------------


def rejection_size_bias_sample(
    n: int, rng: np.random.Generator, retry_cap: int = REJECTION_RETRY_CAP
) -> CouplingOutcome:
    """Size-bias sample by definition: draw a site I uniformly, then
    resample the tree until it has a crossing at I.

    The accepted tree is recorded as both `tree` and `biased_tree` (the
    conditional vector fully determines the sample), so the outcome is a
    degenerate coupling with x == x_s; `retries` counts rejected draws.
    Expected retries are n^2/4.
    """
    if n < 4:
        raise GuardError(f"couplings need n >= 4, got {n}")
    j = _uniform_index(n, rng)
    for tries in range(retry_cap + 1):
        t = sample_uniform_tree(n, rng)
        if has_crossing_at(t, j):
            x = count_crossings_fast(t)
            return CouplingOutcome(tree=t, index=j, biased_tree=t, x=x, x_s=x, retries=tries)
    raise RetryLimitError(f"rejection cap {retry_cap} hit at n={n} (site {j.vertices})")


# ---------------------------------------------------------------------------
# exact small-n oracles
# ---------------------------------------------------------------------------


def size_bias_law_oracle(n: int) -> SizeBiasLaw:
    """The size-bias law from its definition: pmf(k) = k P(X=k) / E[X],
    with P(X=k) from exhaustive enumeration."""
    if not 4 <= n <= 7:
        raise GuardError(f"size-bias oracle guarded to 4 <= n <= 7, got {n}")
    law = enumeration_law(n)
    mu = sum((Fraction(k) * p for k, p in law.items()), Fraction(0))
    pmf = {k: Fraction(k) * p / mu for k, p in law.items() if k > 0}
    return SizeBiasLaw(n=n, pmf=pmf)


def _all_indices(n: int) -> list[CrossingIndex]:
    return [CrossingIndex(*q) for q in combinations(range(1, n + 1), 4)]


def rejection_marginal_exact(n: int) -> SizeBiasLaw:
    """Exact law of the rejection sampler's count, by enumerating the
    conditional law at every site and averaging.

    Must equal the size-bias oracle: summing k-indicators over sites
    turns the site average of conditional laws into k P(X=k) / mu.
    """
    if not 4 <= n <= 7:
        raise GuardError(f"rejection oracle guarded to 4 <= n <= 7, got {n}")
    nsites = comb(n, 4)
    pmf: dict[int, Fraction] = {}
    for j in _all_indices(n):
        pairs = np.array([[j.a, j.c], [j.b, j.d]], dtype=np.int64)
        counts, flags = _kernels.enumerate_counts_and_containment(n, pairs[:, 0], pairs[:, 1], True)
        hit = counts[flags == 1]
        total = int(hit.shape[0])
        values, reps = np.unique(hit, return_counts=True)
        for k, r in zip(values, reps):
            key = int(k)
            pmf[key] = pmf.get(key, Fraction(0)) + Fraction(int(r), total * nsites)
    return SizeBiasLaw(n=n, pmf=pmf)


@dataclass(frozen=True)
class _CouplingScan:
    """One full enumeration of (tree, site, branch) triples."""

    n: int
    pmf: dict[int, Fraction]  # law of x_s under the construction
    mean_diff_by_tree: dict[LabeledTree, Fraction]  # E[x_s - x | T]
    x_by_tree: dict[LabeledTree, int]
    max_abs_diff: int


@lru_cache(maxsize=None)
def _coupling_scan(n: int) -> _CouplingScan:
    if not 4 <= n <= COUPLING_EXACT_MAX_N:
        raise GuardError(f"coupling enumeration guarded to 4 <= n <= {COUPLING_EXACT_MAX_N}, got {n}")
    sites = _all_indices(n)
    w_site = Fraction(1, len(sites))
    w_tree = Fraction(1, tree_count(n))
    pmf: dict[int, Fraction] = {}
    mean_diff: dict[LabeledTree, Fraction] = {}
    x_of: dict[LabeledTree, int] = {}
    max_abs = 0
    for t in enumerate_trees(n):
        x = count_crossings_naive(t)
        x_of[t] = x
        acc = Fraction(0)
        for j in sites:
            for ts, w in _construct_branches(t, j):
                x_s = count_crossings_naive(ts)
                pmf[x_s] = pmf.get(x_s, Fraction(0)) + w_tree * w_site * w
                acc += w_site * w * (x_s - x)
                if abs(x_s - x) > max_abs:
                    max_abs = abs(x_s - x)
        mean_diff[t] = acc
    return _CouplingScan(n=n, pmf=pmf, mean_diff_by_tree=mean_diff, x_by_tree=x_of,
                         max_abs_diff=max_abs)


def coupling_marginal_exact(n: int) -> SizeBiasLaw:
    """Exact law of the constructive coupling's count (full enumeration
    of trees, sites, and deletion branches)."""
    return SizeBiasLaw(n=n, pmf=dict(_coupling_scan(n).pmf))


def coupling_max_abs_diff_exact(n: int) -> int:
    """Largest |x_s - x| over every (tree, site, branch) triple."""
    return _coupling_scan(n).max_abs_diff


@dataclass(frozen=True)
class IncrementVariance:
    """Exact variance of the conditional mean coupling increment.

    by_count conditions on the crossing count (the quantity entering the
    Kolmogorov bound); by_tree conditions on the whole tree.  Conditioning
    on more information never shrinks the variance of the conditional
    mean, so by_count <= by_tree always.
    """

    n: int
    by_count: Fraction
    by_tree: Fraction


def increment_conditional_variance(n: int) -> IncrementVariance:
    """Var(E[X^s - X | X]) and Var(E[X^s - X | T]) for the constructive
    coupling, both exact."""
    scan = _coupling_scan(n)
    tree_weight = Fraction(1, tree_count(n))
    mean_by_x: dict[int, Fraction] = {}
    mass_by_x: dict[int, Fraction] = {}
    e1 = Fraction(0)
    e2_tree = Fraction(0)
    for t, d_t in scan.mean_diff_by_tree.items():
        x = scan.x_by_tree[t]
        mean_by_x[x] = mean_by_x.get(x, Fraction(0)) + tree_weight * d_t
        mass_by_x[x] = mass_by_x.get(x, Fraction(0)) + tree_weight
        e1 += tree_weight * d_t
        e2_tree += tree_weight * d_t * d_t
    by_tree = e2_tree - e1 * e1
    e2_count = Fraction(0)
    for x, mass in mass_by_x.items():
        d_x = mean_by_x[x] / mass  # E[X^s - X | X = x]
        e2_count += mass * d_x * d_x
    by_count = e2_count - e1 * e1
    return IncrementVariance(n=n, by_count=by_count, by_tree=by_tree)


# ---------------------------------------------------------------------------
# batch sampling (kernel-backed, for large sample counts)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingBatch:
    """Vectorized coupling outcomes: counts only, plus rejection stats."""

    n: int
    mode: str
    x: np.ndarray
    x_s: np.ndarray
    retries: np.ndarray | None = None

    @property
    def max_abs_diff(self) -> int:
        return int(np.max(np.abs(self.x_s - self.x))) if self.x.size else 0


def _sample_quads(n: int, rows: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sorted 4-subsets of 1..n, by redraw-on-collision."""
    quads = rng.integers(1, n + 1, size=(rows, 4))
    while True:
        q = np.sort(quads, axis=1)
        bad = (q[:, 0] == q[:, 1]) | (q[:, 1] == q[:, 2]) | (q[:, 2] == q[:, 3])
        if not bad.any():
            return q
        quads[bad] = rng.integers(1, n + 1, size=(int(bad.sum()), 4))


def sample_couplings_batch(
    n: int,
    samples: int,
    seed: int,
    mode: str = "construct",
    retry_cap: int = REJECTION_RETRY_CAP,
) -> CouplingBatch:
    """Draw many couplings at once (counts only).

    construct mode consumes a numpy stream derived from the seed (codes,
    sites, branch bits, in fixed chunks); reject mode draws one site per
    sample from the same stream and runs the in-kernel rejection scan.
    Results are deterministic in (n, samples, seed, mode) and independent
    of thread count.
    """
    if n < 4:
        raise GuardError(f"couplings need n >= 4, got {n}")
    if samples < 1:
        raise GuardError("samples >= 1 required")
    rng = np.random.default_rng(normalize_seed(seed))
    if mode == "construct":
        xs: list[np.ndarray] = []
        xss: list[np.ndarray] = []
        chunk = max(1, min(samples, (1 << 22) // max(n, 4)))
        done = 0
        while done < samples:
            rows = min(chunk, samples - done)
            codes = rng.integers(1, n + 1, size=(rows, n - 2))
            quads = _sample_quads(n, rows, rng)
            bits = rng.integers(0, 2, size=(rows, 2))
            x, x_s = _kernels.batch_construct_couplings(codes, n, quads, bits)
            xs.append(x)
            xss.append(x_s)
            done += rows
        return CouplingBatch(n=n, mode=mode, x=np.concatenate(xs), x_s=np.concatenate(xss))
    if mode == "reject":
        quads = _sample_quads(n, samples, rng)
        counts, retries = _kernels.rejection_batch(
            n, quads, normalize_seed(seed), _BATCH_WORKERS, retry_cap
        )
        if np.any(retries < 0):
            raise RetryLimitError(f"rejection cap {retry_cap} hit at n={n}")
        return CouplingBatch(n=n, mode=mode, x=counts.copy(), x_s=counts, retries=retries)
    raise GuardError(f"unknown mode {mode!r}")
