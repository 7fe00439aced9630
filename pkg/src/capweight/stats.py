"""Correlation analysis between score vectors and human annotations.

Provides the sample Pearson coefficient, a two-sample z-test on the
difference of two correlations via the atanh transform, and a report
comparing two scoring methods against the same human annotations. The
two-sided normal tail is computed with ``math.erfc``, so no statistics
library is required and p-values are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import TokenKey


@dataclass(frozen=True)
class CorrelationReport:
    """Correlations of two methods against the same annotations.

    ``z_stat`` and ``p_value`` are None when the two-sample test is
    unavailable (a coefficient of magnitude 1, or too few samples).
    """

    r_a: float
    r_b: float
    n_a: int
    n_b: int
    z_stat: float | None
    p_value: float | None


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient, clamped into [-1, 1]."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 samples, got {n}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if not all(math.isfinite(v) for v in xs + ys):
        raise ValueError("inputs must be finite")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [v - mean_x for v in xs]
    dy = [v - mean_y for v in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


def normal_two_sided_p(z: float) -> float:
    """P(|Z| >= |z|) for a standard normal Z."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def fisher_compare(r_a: float, n_a: int, r_b: float, n_b: int) -> tuple[float, float]:
    """Two-sample z-test for the difference of two correlations.

    Applies atanh to each coefficient and compares against the standard
    error sqrt(1/(n_a - 3) + 1/(n_b - 3)). Returns (z_stat, p_value)
    with a two-sided p.
    """
    for r in (r_a, r_b):
        if not abs(r) < 1.0:
            raise ValueError(f"|r| must be < 1 for the z-test, got {r}")
    for n in (n_a, n_b):
        if n < 4:
            raise ValueError(f"need at least 4 samples per side, got {n}")
    z_a = math.atanh(r_a)
    z_b = math.atanh(r_b)
    se = math.sqrt(1.0 / (n_a - 3) + 1.0 / (n_b - 3))
    z_stat = (z_a - z_b) / se
    return z_stat, normal_two_sided_p(z_stat)


def correlate_methods(
    human: Mapping[TokenKey, float],
    method_a: Mapping[TokenKey, float],
    method_b: Mapping[TokenKey, float],
) -> CorrelationReport:
    """Correlate two score maps against human scores on the annotated tokens.

    All maps are keyed by token; every annotated key must be present in
    both methods' maps. When either coefficient has magnitude 1 (or the
    sample is too small for the z-test) the report carries the
    coefficients with z_stat and p_value set to None.
    """
    keys = sorted(human.keys())
    if not keys:
        raise ValueError("no annotated tokens to correlate")
    for name, scores in (("method_a", method_a), ("method_b", method_b)):
        absent = [k for k in keys if k not in scores]
        if absent:
            raise ValueError(
                f"{name} is missing {len(absent)} annotated token(s), "
                f"first: {absent[0]!r}"
            )
    truth = [human[k] for k in keys]
    r_a = pearson([method_a[k] for k in keys], truth)
    r_b = pearson([method_b[k] for k in keys], truth)
    n = len(keys)

    z_stat: float | None = None
    p_value: float | None = None
    if abs(r_a) < 1.0 and abs(r_b) < 1.0 and n >= 4:
        z_stat, p_value = fisher_compare(r_a, n, r_b, n)
    return CorrelationReport(r_a=r_a, r_b=r_b, n_a=n, n_b=n, z_stat=z_stat, p_value=p_value)
