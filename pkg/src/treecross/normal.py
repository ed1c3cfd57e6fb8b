"""Normal approximation of the standardized crossing count.

Contains the ingredients of the quantitative CLT check: a high-accuracy
standard normal CDF, the exact sup-distance between an empirical CDF and
a continuous CDF, the bounded-coupling Kolmogorov bound evaluator
(6*mu*A^2/sigma^3 + 2*mu*Psi/sigma^2 with A = 4(n-3) and
Psi <= sqrt(2112 n)), Monte Carlo simulation of the standardized count,
and a log-log rate fit.

Standardization always uses the exact mean/variance formulas, not sample
moments: the convergence statement is about (X - mu_n)/sigma_n with the
true moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .crossings import CrossingIndex
from .errors import GuardError
from .exact import exact_mean, exact_variance, tree_count
from .trees import ENUMERATION_MAX_N

# Rational erfc approximation, coefficients from W. J. Cody's CALERF
# (SPECFUN); three branches give ~1e-16 relative accuracy, far below the
# Monte Carlo noise floor this CDF is compared against.
_ERF_A = (3.16112374387056560e0, 1.13864154151050156e2, 3.77485237685302021e2,
          3.20937758913846947e3, 1.85777706184603153e-1)
_ERF_B = (2.36012909523441209e1, 2.44024637934444173e2, 1.28261652607737228e3,
          2.84423683343917062e3)
_ERF_C = (5.64188496988670089e-1, 8.88314979438837594e0, 6.61191906371416295e1,
          2.98635138197400131e2, 8.81952221241769090e2, 1.71204761263407058e3,
          2.05107837782607147e3, 1.23033935479799725e3, 2.15311535474403846e-8)
_ERF_D = (1.57449261107098347e1, 1.17693950891312499e2, 5.37181101862009858e2,
          1.62138957456669019e3, 3.29079923573345963e3, 4.36261909014324716e3,
          3.43936767414372164e3, 1.23033935480374942e3)
_ERF_P = (3.05326634961232344e-1, 3.60344899949804439e-1, 1.25781726111229246e-1,
          1.60837851487422766e-2, 6.58749161529837803e-4, 1.63153871373020978e-2)
_ERF_Q = (2.56852019228982242e0, 1.87295284992346047e0, 5.27905102951428412e-1,
          6.05183413124413191e-2, 2.33520497626869185e-3)
_ONE_OVER_SQRT_PI = 5.6418958354775628695e-1
_SQRT2 = math.sqrt(2.0)


def _erfc_nonneg(y: np.ndarray) -> np.ndarray:
    """erfc(y) for y >= 0 elementwise (Cody branches)."""
    out = np.empty_like(y)

    small = y <= 0.46875
    if small.any():
        ys = y[small]
        z = ys * ys
        num = _ERF_A[4] * z
        den = z
        for i in range(3):
            num = (num + _ERF_A[i]) * z
            den = (den + _ERF_B[i]) * z
        out[small] = 1.0 - ys * (num + _ERF_A[3]) / (den + _ERF_B[3])

    mid = (~small) & (y <= 4.0)
    if mid.any():
        ys = y[mid]
        num = _ERF_C[8] * ys
        den = ys
        for i in range(7):
            num = (num + _ERF_C[i]) * ys
            den = (den + _ERF_D[i]) * ys
        r = (num + _ERF_C[7]) / (den + _ERF_D[7])
        ysq = np.trunc(ys * 16.0) / 16.0
        dl = (ys - ysq) * (ys + ysq)
        out[mid] = np.exp(-ysq * ysq) * np.exp(-dl) * r

    big = y > 4.0
    if big.any():
        ys = y[big]
        z = 1.0 / (ys * ys)
        num = _ERF_P[5] * z
        den = z
        for i in range(4):
            num = (num + _ERF_P[i]) * z
            den = (den + _ERF_Q[i]) * z
        r = z * (num + _ERF_P[4]) / (den + _ERF_Q[4])
        r = (_ONE_OVER_SQRT_PI - r) / ys
        ysq = np.trunc(ys * 16.0) / 16.0
        dl = (ys - ysq) * (ys + ysq)
        with np.errstate(under="ignore"):
            out[big] = np.exp(-ysq * ysq) * np.exp(-dl) * r
    return out


def normal_cdf_array(z: np.ndarray) -> np.ndarray:
    """Standard normal CDF, elementwise; absolute error below 1e-14."""
    z = np.asarray(z, dtype=np.float64)
    if np.isnan(z).any():
        raise ValueError("NaN passed to normal_cdf")
    y = -z / _SQRT2
    neg = y < 0.0
    e = _erfc_nonneg(np.abs(y))
    e = np.where(neg, 2.0 - e, e)
    return 0.5 * e


def normal_cdf(z: float) -> float:
    """Standard normal CDF of a scalar (same code path as the array form)."""
    return float(normal_cdf_array(np.array([z]))[0])


# ---------------------------------------------------------------------------
# empirical Kolmogorov distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalSummary:
    """Sorted standardized samples plus raw-count summary statistics."""

    n: int
    sample_count: int
    samples: np.ndarray  # sorted ascending, W = (X - mu_n)/sigma_n
    mean: float  # of raw counts
    variance: float  # of raw counts (ddof=1)


def empirical_kolmogorov(summary: EmpiricalSummary) -> float:
    """sup_z |F_N(z) - Phi(z)|, exactly, via the order statistics:
    max over i of max(|i/N - Phi(x_(i))|, |(i-1)/N - Phi(x_(i))|)."""
    if summary.sample_count < 1 or summary.samples.size < 1:
        raise ValueError("empirical distance needs at least one sample")
    if summary.sample_count != summary.samples.size:
        raise ValueError("sample_count does not match the sample array")
    x = summary.samples
    if np.any(np.diff(x) < 0):
        raise ValueError("samples must be sorted ascending")
    big_f = normal_cdf_array(x)
    n = summary.sample_count
    i = np.arange(1, n + 1, dtype=np.float64)
    upper = np.abs(i / n - big_f)
    lower = np.abs((i - 1.0) / n - big_f)
    return float(max(upper.max(), lower.max()))


# ---------------------------------------------------------------------------
# the Kolmogorov bound of the bounded size-bias coupling
# ---------------------------------------------------------------------------

INCREMENT_VARIANCE_CONSTANT = 2112  # Var(E[X^s - X | X]) <= 2112 n


@dataclass(frozen=True)
class BoundReport:
    """Evaluated Kolmogorov bound 6 mu A^2/sigma^3 + 2 mu Psi/sigma^2."""

    n: int
    mu: float
    sigma: float
    a_bound: float  # sure coupling bound A = 4(n-3)
    psi_bound: float  # sqrt(2112 n)
    term1: float
    term2: float
    total: float


def theoretical_bound(n: int) -> BoundReport:
    """Evaluate the bound with exact moments projected to float."""
    if n <= 4:
        raise GuardError(f"bound evaluation needs n >= 5, got {n}")
    mu = float(exact_mean(n))
    sigma = math.sqrt(float(exact_variance(n)))
    a = 4.0 * (n - 3)
    psi = math.sqrt(INCREMENT_VARIANCE_CONSTANT * n)
    term1 = 6.0 * mu * a * a / sigma**3
    term2 = 2.0 * mu * psi / sigma**2
    return BoundReport(
        n=n, mu=mu, sigma=sigma, a_bound=a, psi_bound=psi,
        term1=term1, term2=term2, total=term1 + term2,
    )


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def simulate_standardized(n: int, samples: int, rng: np.random.Generator) -> EmpiricalSummary:
    """Crossing counts of `samples` independent uniform trees, standardized
    by the exact mean and standard deviation."""
    if n < 5:
        raise GuardError(f"simulation needs n >= 5 (positive variance), got {n}")
    if samples < 1:
        raise GuardError("samples >= 1 required")
    counts = np.empty(samples, dtype=np.int64)
    chunk = max(1, min(samples, (1 << 22) // max(n, 4)))
    done = 0
    while done < samples:
        rows = min(chunk, samples - done)
        codes = rng.integers(1, n + 1, size=(rows, n - 2))
        counts[done : done + rows] = _kernels.batch_crossing_counts(codes, n, False)
        done += rows
    mu = float(exact_mean(n))
    sigma = math.sqrt(float(exact_variance(n)))
    w = np.sort((counts - mu) / sigma)
    return EmpiricalSummary(
        n=n,
        sample_count=samples,
        samples=w,
        mean=float(counts.mean()),
        variance=float(counts.var(ddof=1)) if samples > 1 else 0.0,
    )


def _disjoint_index_pairs(i: CrossingIndex, j: CrossingIndex) -> np.ndarray:
    if not i.disjoint_from(j):
        raise ValueError(f"indices {i.vertices} and {j.vertices} share a vertex")
    pairs = [(min(u, v), max(u, v)) for u in i.vertices for v in j.vertices]
    return np.array(pairs, dtype=np.int64)


def adjacency_event_probability(
    n: int, i: CrossingIndex, j: CrossingIndex, samples: int, rng: np.random.Generator
) -> float:
    """Monte Carlo probability that some vertex of site i is adjacent to
    some vertex of site j (16 candidate edges; union-bounded by 32/n)."""
    if max(i.d, j.d) > n:
        raise ValueError("site vertices outside 1..n")
    if samples < 1:
        raise GuardError("samples >= 1 required")
    pairs = _disjoint_index_pairs(i, j)
    hits = 0
    chunk = max(1, min(samples, (1 << 22) // max(n, 4)))
    done = 0
    while done < samples:
        rows = min(chunk, samples - done)
        codes = rng.integers(1, n + 1, size=(rows, n - 2))
        flags = _kernels.batch_contains_any_pair(codes, n, pairs[:, 0], pairs[:, 1])
        hits += int(flags.sum())
        done += rows
    return hits / samples


def adjacency_event_probability_exact(n: int, i: CrossingIndex, j: CrossingIndex) -> Fraction:
    """Exhaustive-enumeration version of the adjacency event (guarded)."""
    if not 2 <= n <= ENUMERATION_MAX_N:
        raise GuardError(f"enumeration guarded to 2 <= n <= {ENUMERATION_MAX_N}, got {n}")
    if max(i.d, j.d) > n:
        raise ValueError("site vertices outside 1..n")
    pairs = _disjoint_index_pairs(i, j)
    _, flags = _kernels.enumerate_counts_and_containment(n, pairs[:, 0], pairs[:, 1], False)
    return Fraction(int(flags.sum()), tree_count(n))


def rate_fit(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Least squares fit of log(distance) against log(n).

    Returns (slope, intercept); the slope is the empirical rate exponent
    (about -1/2 for a C/sqrt(n) law).
    """
    if len(points) < 3:
        raise GuardError(f"rate fit needs >= 3 points, got {len(points)}")
    ns = np.array([p[0] for p in points], dtype=np.float64)
    ds = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(ds <= 0) or np.any(ns <= 0):
        raise ValueError("rate fit needs positive n and positive distances")
    slope, intercept = np.polyfit(np.log(ns), np.log(ds), 1)
    return float(slope), float(intercept)
