"""Self-contained statistical machinery: resampling tests, BCa bootstrap,
FDR control, and the handful of estimators the analysis pipelines share.

Conventions used throughout:

* Resampling p-values follow the permutation convention
  p = (1 + #{exceedances}) / (n_resamples + 1), so p is never exactly 0
  and is bounded below by 1/(n_resamples + 1).
* Two-sided comparisons count |T - center| exceedances (center defaults
  to 0; pass ``center=1.0`` for ratio statistics whose null sits at 1).
* Every function that draws randomness accepts ``seed`` as an int,
  ``numpy.random.Generator``, or None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.stats as ss
from scipy.special import expit

__all__ = [
    "TestResult",
    "ConfidenceInterval",
    "CorrelationResult",
    "LogisticFit",
    "QuadraticFit",
    "permutation_test",
    "p_value_from_null",
    "bootstrap_bca_ci",
    "bh_fdr",
    "pearson_r",
    "welch_t",
    "mann_whitney_auc",
    "normalized_mutual_information",
    "adjusted_rand_index",
    "logistic_fit",
    "quadratic_fit",
]

_ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class TestResult:
    """Outcome of a single hypothesis test."""

    statistic: float
    p_value: float
    method: str  # "permutation" | "t_welch" | "analytic"
    n_resamples: int | None = None
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "method": self.method,
            "n_resamples": self.n_resamples,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class ConfidenceInterval:
    low: float
    high: float
    level: float = 0.95
    method: str = "bca"
    n_resamples: int | None = None

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high

    def to_dict(self) -> dict:
        return {
            "low": self.low,
            "high": self.high,
            "level": self.level,
            "method": self.method,
            "n_resamples": self.n_resamples,
        }


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int
    method: str = "analytic"

    def to_dict(self) -> dict:
        return {"r": self.r, "p_value": self.p_value, "n": self.n, "method": self.method}


def _check_alternative(alternative: str) -> None:
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"alternative must be one of {_ALTERNATIVES}, got {alternative!r}")


def _exceedance_p(observed: float, null: np.ndarray, alternative: str, center: float) -> float:
    n = len(null)
    if alternative == "two-sided":
        count = int(np.sum(np.abs(null - center) >= abs(observed - center)))
    elif alternative == "greater":
        count = int(np.sum(null >= observed))
    else:
        count = int(np.sum(null <= observed))
    return (1 + count) / (n + 1)


def permutation_test(
    observed: float,
    statistic: Callable,
    data,
    permute: Callable,
    *,
    n_resamples: int = 2000,
    seed=None,
    alternative: str = "two-sided",
    center: float = 0.0,
) -> TestResult:
    """Generic permutation test.

    ``permute(data, rng)`` must return one resampled replicate under the
    caller's exchange scheme (label shuffle, sign flip, pairing swap, ...);
    ``statistic`` maps a replicate to a scalar.
    """
    _check_alternative(alternative)
    if n_resamples < 1:
        raise ValueError("n_resamples must be positive")
    rng = np.random.default_rng(seed)
    null = np.empty(n_resamples)
    for i in range(n_resamples):
        null[i] = statistic(permute(data, rng))
    p = _exceedance_p(float(observed), null, alternative, center)
    return TestResult(float(observed), p, "permutation", n_resamples)


def p_value_from_null(
    observed: float,
    null: Sequence[float],
    *,
    alternative: str = "two-sided",
    center: float = 0.0,
) -> TestResult:
    """Permutation-convention p-value against a precomputed null sample."""
    _check_alternative(alternative)
    null = np.asarray(null, dtype=float)
    if null.size == 0:
        raise ValueError("null sample is empty")
    p = _exceedance_p(float(observed), null, alternative, center)
    return TestResult(float(observed), p, "permutation", int(null.size))


def _jackknife_acceleration(data: np.ndarray, statistic: Callable) -> float:
    n = len(data)
    jack = np.empty(n)
    for i in range(n):
        jack[i] = statistic(np.delete(data, i))
    u = jack.mean() - jack
    denom = 6.0 * (np.sum(u**2)) ** 1.5
    if denom == 0.0:
        return 0.0
    return float(np.sum(u**3) / denom)


def bootstrap_bca_ci(
    data,
    statistic: Callable,
    *,
    n_resamples: int = 5000,
    level: float = 0.95,
    seed=None,
    max_retries: int = 10,
) -> ConfidenceInterval:
    """Bias-corrected and accelerated (BCa) bootstrap confidence interval.

    The bias factor z0 comes from the bootstrap CDF evaluated at the
    observed statistic; the acceleration from jackknife skewness. A
    resample on which the statistic is undefined (raises or is non-finite)
    is redrawn up to ``max_retries`` times before giving up.
    """
    data = np.asarray(data, dtype=float)
    n = len(data)
    if n < 2:
        raise ValueError("need at least 2 observations")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    theta_hat = float(statistic(data))
    if np.all(data == data[0]):
        # Degenerate sample: every resample is identical.
        return ConfidenceInterval(theta_hat, theta_hat, level, "bca", n_resamples)

    rng = np.random.default_rng(seed)
    thetas = np.empty(n_resamples)
    for b in range(n_resamples):
        for _ in range(max_retries + 1):
            idx = rng.integers(0, n, n)
            try:
                value = float(statistic(data[idx]))
            except (ValueError, ZeroDivisionError, FloatingPointError):
                continue
            if math.isfinite(value):
                thetas[b] = value
                break
        else:
            raise RuntimeError(
                f"statistic undefined after {max_retries} redraws on resample {b}"
            )

    # Bias correction, with the empirical CDF clipped away from {0, 1} so
    # norm.ppf stays finite on extreme statistics.
    prop = np.sum(thetas < theta_hat) / n_resamples
    prop = min(max(prop, 1.0 / (n_resamples + 1)), n_resamples / (n_resamples + 1.0))
    z0 = ss.norm.ppf(prop)
    a = _jackknife_acceleration(data, statistic)

    alpha = 1.0 - level
    lo_hi = []
    for z_alpha in (ss.norm.ppf(alpha / 2.0), ss.norm.ppf(1.0 - alpha / 2.0)):
        denom = 1.0 - a * (z0 + z_alpha)
        if denom <= 0.0:
            # Acceleration pathologically large: fall back to the endpoint.
            adj = 1.0 if (z0 + z_alpha) > 0 else 0.0
        else:
            adj = ss.norm.cdf(z0 + (z0 + z_alpha) / denom)
        lo_hi.append(float(np.quantile(thetas, min(max(adj, 0.0), 1.0))))
    low, high = min(lo_hi), max(lo_hi)
    return ConfidenceInterval(low, high, level, "bca", n_resamples)


def bh_fdr(p_values, q: float = 0.05) -> np.ndarray:
    """Benjamini-Hochberg step-up: boolean rejection mask in input order."""
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1:
        raise ValueError("p_values must be one-dimensional")
    if p.size and (np.any(p < 0) or np.any(p > 1) or np.any(np.isnan(p))):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    mask = np.zeros(m, dtype=bool)
    if m == 0:
        return mask
    order = np.argsort(p, kind="stable")
    thresholds = q * np.arange(1, m + 1) / m
    passing = np.nonzero(p[order] <= thresholds)[0]
    if passing.size:
        mask[order[: passing[-1] + 1]] = True
    return mask


def pearson_r(x, y, *, n_resamples: int | None = None, seed=None) -> CorrelationResult | None:
    """Pearson correlation with a two-sided p-value.

    Default p uses the t approximation r*sqrt((n-2)/(1-r^2)); pass
    ``n_resamples`` for a permutation p instead (shuffling y). Returns
    None when either input is constant (correlation undefined).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be one-dimensional with matching length")
    n = x.size
    if n < 3:
        raise ValueError("need at least 3 observations")
    sx = x.std()
    sy = y.std()
    if sx == 0.0 or sy == 0.0:
        return None

    def _r(a: np.ndarray, b: np.ndarray) -> float:
        a = a - a.mean()
        b = b - b.mean()
        return float(a @ b / math.sqrt((a @ a) * (b @ b)))

    r = _r(x, y)
    if n_resamples is None:
        if abs(r) >= 1.0:
            p = 0.0
        else:
            t = r * math.sqrt((n - 2) / (1.0 - r * r))
            p = 2.0 * float(ss.t.sf(abs(t), n - 2))
        return CorrelationResult(r, p, n, "analytic")

    rng = np.random.default_rng(seed)
    null = np.empty(n_resamples)
    for i in range(n_resamples):
        null[i] = _r(x, rng.permutation(y))
    p = _exceedance_p(r, null, "two-sided", 0.0)
    return CorrelationResult(r, p, n, "permutation")


def welch_t(a, b) -> TestResult:
    """Welch's unequal-variance t-test, two-sided.

    Degenerate inputs (zero variance on both sides) short-circuit: equal
    means give p = 1, different means give p = 0 with the degenerate flag.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least 2 observations")
    va = a.var(ddof=1)
    vb = b.var(ddof=1)
    if va == 0.0 and vb == 0.0:
        if a.mean() == b.mean():
            return TestResult(0.0, 1.0, "t_welch", degenerate=True)
        stat = math.inf if a.mean() > b.mean() else -math.inf
        return TestResult(stat, 0.0, "t_welch", degenerate=True)
    stat, p = ss.ttest_ind(a, b, equal_var=False)
    return TestResult(float(stat), float(p), "t_welch")


def mann_whitney_auc(pos, neg) -> float:
    """Rank-based AUC (Mann-Whitney U / (n_pos * n_neg)); ties count 1/2.

    The smaller of the two U statistics is the one divided, its quotient is
    snapped to the 2**-53 grid (so its complement is exactly representable),
    and the other orientation is returned as that exact complement. Swapping
    the arguments therefore always yields exactly 1 - AUC, bit for bit; the
    snap perturbs the value by at most 2**-54.
    """
    pos = np.asarray(pos, dtype=float)
    neg = np.asarray(neg, dtype=float)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("both score samples must be non-empty")
    ranks = ss.rankdata(np.concatenate([pos, neg]))
    total = pos.size * neg.size
    # Rank sums are exact half-integers, so both U values are exact.
    u_pos = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    u_neg = total - u_pos
    # Adding then subtracting 0.5 rounds the quotient q <= 0.5 onto the
    # 2**-53 grid (the add rounds; the subtract is Sterbenz-exact).
    q = (min(u_pos, u_neg) / total + 0.5) - 0.5
    if u_pos <= u_neg:
        return float(q)
    return float(1.0 - q)


def _contingency(labels_a: Sequence, labels_b: Sequence) -> np.ndarray:
    if len(labels_a) != len(labels_b):
        raise ValueError("label sequences must have equal length")
    if len(labels_a) == 0:
        raise ValueError("label sequences are empty")
    ai = {lab: i for i, lab in enumerate(dict.fromkeys(labels_a))}
    bi = {lab: i for i, lab in enumerate(dict.fromkeys(labels_b))}
    table = np.zeros((len(ai), len(bi)), dtype=np.int64)
    for la, lb in zip(labels_a, labels_b):
        table[ai[la], bi[lb]] += 1
    return table


def normalized_mutual_information(labels_a, labels_b) -> float:
    """NMI with arithmetic-mean normalization.

    Either partition having a single cluster (zero entropy) returns 0 by
    convention; identical partitions with >= 2 clusters return 1.
    """
    table = _contingency(labels_a, labels_b)
    n = table.sum()
    pa = table.sum(axis=1) / n
    pb = table.sum(axis=0) / n
    ha = -np.sum(pa * np.log(pa))
    hb = -np.sum(pb * np.log(pb))
    if ha == 0.0 or hb == 0.0:
        return 0.0
    mi = 0.0
    rows, cols = np.nonzero(table)
    for i, j in zip(rows, cols):
        pij = table[i, j] / n
        mi += pij * math.log(pij / (pa[i] * pb[j]))
    nmi = mi / ((ha + hb) / 2.0)
    return float(min(max(nmi, 0.0), 1.0))


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected pair-counting agreement between two partitions."""
    table = _contingency(labels_a, labels_b)
    n = int(table.sum())

    def _comb2(v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.sum(v * (v - 1) / 2.0))

    index = _comb2(table)
    sum_a = _comb2(table.sum(axis=1))
    sum_b = _comb2(table.sum(axis=0))
    total = n * (n - 1) / 2.0
    expected = sum_a * sum_b / total if total else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0 if index == max_index else 0.0
    return float((index - expected) / (max_index - expected))


@dataclass(frozen=True)
class LogisticFit:
    intercept: float
    coefficients: np.ndarray  # per standardized feature
    auc: float
    n_iter: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "coefficients": [float(c) for c in self.coefficients],
            "auc": self.auc,
            "n_iter": self.n_iter,
            "converged": self.converged,
        }


def logistic_fit(X, y, *, l2: float = 1e-6, max_iter: int = 100, tol: float = 1e-8) -> LogisticFit:
    """Ridge-regularized logistic regression via IRLS on standardized features.

    Returns coefficients on the standardized scale plus the in-sample AUC
    of the fitted probabilities. The intercept is unpenalized.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, k) and y must be (n,)")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("y must be binary 0/1")
    if y.min() == y.max():
        raise ValueError("y needs both classes present")

    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0.0] = 1.0
    Z = np.column_stack([np.ones(len(y)), (X - mu) / sd])
    k = Z.shape[1]
    penalty = np.full(k, l2)
    penalty[0] = 0.0

    beta = np.zeros(k)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = Z @ beta
        p = expit(eta)
        w = np.maximum(p * (1.0 - p), 1e-10)
        grad = Z.T @ (y - p) - penalty * beta
        hess = (Z.T * w) @ Z + np.diag(penalty)
        step = np.linalg.solve(hess, grad)
        beta = beta + step
        if np.max(np.abs(step)) < tol:
            converged = True
            break
    p = expit(Z @ beta)
    auc = mann_whitney_auc(p[y == 1], p[y == 0])
    return LogisticFit(float(beta[0]), beta[1:].copy(), auc, it, converged)


@dataclass(frozen=True)
class QuadraticFit:
    beta0: float
    beta1: float
    beta2: float
    r_squared: float
    vertex: float | None  # -beta1 / (2 beta2); None when beta2 ~ 0
    beta_se: tuple[float, float, float] | None
    beta2_p: float | None
    n: int

    def to_dict(self) -> dict:
        return {
            "beta0": self.beta0,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "r_squared": self.r_squared,
            "vertex": self.vertex,
            "beta_se": list(self.beta_se) if self.beta_se else None,
            "beta2_p": self.beta2_p,
            "n": self.n,
        }


def quadratic_fit(x, y) -> QuadraticFit:
    """Least-squares fit of y = b0 + b1 x + b2 x^2 with coefficient SEs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be one-dimensional with matching length")
    if np.unique(x).size < 3:
        raise ValueError("need at least 3 distinct x values")
    n = x.size
    design = np.column_stack([np.ones(n), x, x * x])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if sst == 0.0 else 1.0 - ssr / sst

    beta_se = None
    beta2_p = None
    if n > 3:
        sigma2 = ssr / (n - 3)
        cov = sigma2 * np.linalg.inv(design.T @ design)
        se = np.sqrt(np.diag(cov))
        beta_se = (float(se[0]), float(se[1]), float(se[2]))
        if se[2] > 0:
            t = beta[2] / se[2]
            beta2_p = 2.0 * float(ss.t.sf(abs(t), n - 3))

    vertex = None
    if abs(beta[2]) > 1e-12:
        vertex = float(-beta[1] / (2.0 * beta[2]))
    return QuadraticFit(
        float(beta[0]), float(beta[1]), float(beta[2]), float(r_squared),
        vertex, beta_se, beta2_p, n,
    )
