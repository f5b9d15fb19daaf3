"""Rank correlation, agreement statistics, and stratum labels.

Spearman's rho is the Pearson correlation of average (tie-aware) ranks.
Two-sided p-values come from an exhaustive permutation test below 10
pairs and from the t approximation t = rho*sqrt((n-2)/(1-rho^2)) with
n-2 degrees of freedom otherwise. Pairs with a missing value in either
series are dropped before anything is computed.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata
from scipy.stats import t as student_t

from .errors import ConstantSeries, MissingWpm, TooFewPairs

SIGNIFICANCE_LEVEL = 0.05
LOA_MULTIPLIER = 1.96

#: largest n for which the permutation test enumerates all n! orderings
EXACT_PERMUTATION_MAX_N = 9
#: permutations sampled (seeded) when "exact" is forced beyond that
MONTE_CARLO_PERMUTATIONS = 20000

WPM_MILD_ABOVE = 160.0
WPM_SEVERE_BELOW = 120.0


class SeverityLabel(enum.IntEnum):
    HC = 0
    Mild = 1
    Moderate = 2
    Severe = 3

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int
    significant: bool
    method: str  # "exact", "monte-carlo", or "t"


@dataclass(frozen=True)
class BlandAltmanResult:
    bias: float
    loa_low: float
    loa_high: float
    points: tuple[tuple[float, float], ...]  # (pair mean, difference)

    @property
    def n(self) -> int:
        return len(self.points)


def _drop_missing(x, y) -> tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise ValueError(f"series lengths differ: {len(x)} vs {len(y)}")
    xs = np.array([math.nan if v is None else float(v) for v in x])
    ys = np.array([math.nan if v is None else float(v) for v in y])
    keep = ~(np.isnan(xs) | np.isnan(ys))
    return xs[keep], ys[keep]


def _standardized(values: np.ndarray) -> np.ndarray:
    centered = values - values.mean()
    return centered / math.sqrt(float(np.dot(centered, centered)))


def _permutation_p(rx: np.ndarray, ry: np.ndarray, rho: float, rng=None) -> float:
    """Fraction of permutations of ry with |rho| at least the observed."""
    u = _standardized(rx)
    v = _standardized(ry)
    n = len(u)
    if rng is None:
        perms = np.array(list(itertools.permutations(range(n))))
    else:
        perms = np.array([rng.permutation(n) for _ in range(MONTE_CARLO_PERMUTATIONS)])
        perms[0] = np.arange(n)  # include the observed ordering
    rhos = v[perms] @ u
    return float(np.mean(np.abs(rhos) >= abs(rho) - 1e-12))


def _t_approximation_p(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return 0.0
    t_stat = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return 2.0 * float(student_t.sf(abs(t_stat), n - 2))


def spearman(x, y, p_method: str = "auto") -> CorrelationResult:
    """Tie-aware Spearman correlation with a two-sided p-value.

    p_method: "auto" enumerates permutations below 10 pairs and uses the
    t approximation otherwise; "exact" forces the permutation test
    (seeded Monte Carlo sampling beyond 9 pairs); "t" forces the
    approximation.
    """
    if p_method not in ("auto", "exact", "t"):
        raise ValueError(f"unknown p-value method {p_method!r}")
    xs, ys = _drop_missing(x, y)
    n = len(xs)
    if n < 3:
        raise TooFewPairs(f"need at least 3 complete pairs, have {n}", n=n)
    if np.unique(xs).size < 2 or np.unique(ys).size < 2:
        raise ConstantSeries("a series with fewer than 2 distinct values has no ranks")

    rx = rankdata(xs)
    ry = rankdata(ys)
    rho = float(np.corrcoef(rx, ry)[0, 1])
    rho = max(-1.0, min(1.0, rho))

    if p_method == "t" or (p_method == "auto" and n > EXACT_PERMUTATION_MAX_N):
        p = _t_approximation_p(rho, n)
        method = "t"
    elif n <= EXACT_PERMUTATION_MAX_N:
        p = _permutation_p(rx, ry, rho)
        method = "exact"
    else:
        rng = np.random.Generator(np.random.PCG64(0))
        p = _permutation_p(rx, ry, rho, rng=rng)
        method = "monte-carlo"
    return CorrelationResult(
        rho=rho, p_value=p, n=n, significant=p < SIGNIFICANCE_LEVEL, method=method
    )


def bland_altman(a, b) -> BlandAltmanResult:
    """Agreement summary: bias and 1.96-SD limits of the differences a - b."""
    xs, ys = _drop_missing(a, b)
    n = len(xs)
    if n < 2:
        raise TooFewPairs(f"need at least 2 complete pairs, have {n}", n=n)
    diffs = xs - ys
    bias = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    half_width = LOA_MULTIPLIER * sd
    points = tuple(zip(((xs + ys) / 2.0).tolist(), diffs.tolist()))
    return BlandAltmanResult(
        bias=bias,
        loa_low=bias - half_width,
        loa_high=bias + half_width,
        points=points,
    )


def classify_severity(group: str, wpm: float | None) -> SeverityLabel:
    """Severity from group membership and speaking rate.

    Healthy controls are always HC regardless of rate. ALS splits on
    speaking rate: above 160 WPM is Mild, 120-160 inclusive is Moderate,
    below 120 is Severe.
    """
    name = group.strip().upper() if isinstance(group, str) else str(group)
    if name == "HC":
        return SeverityLabel.HC
    if name != "ALS":
        raise ValueError(f"group must be HC or ALS, got {group!r}")
    if wpm is None or (isinstance(wpm, float) and math.isnan(wpm)):
        raise MissingWpm("ALS record has no speaking rate")
    if wpm <= 0:
        raise ValueError(f"speaking rate must be positive, got {wpm}")
    if wpm > WPM_MILD_ABOVE:
        return SeverityLabel.Mild
    if wpm < WPM_SEVERE_BELOW:
        return SeverityLabel.Severe
    return SeverityLabel.Moderate
