"""Two-sided certificates for the AM-GM gap and related variance comparisons.

Every routine returns a :class:`BoundReport` ``lower <= value <= upper``.  The
report checks its own sandwich on construction and raises
:class:`~amgm_bounds.errors.InvariantViolation` if rounding ever broke it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DimensionError, DomainError, InvariantViolation, PreconditionError
from .means import (
    Data,
    Weights,
    WeightVector,
    _pair,
    _sqrt_variance,
    _stable_gap,
    _variance,
    as_weights,
)

#: relative slack allowed before a sandwich counts as broken
INVARIANT_RTOL = 1e-10
#: relative slack below which a side is reported as attained
TIGHT_RTOL = 1e-9


class Method(str, enum.Enum):
    THEOREM = "theorem"
    CARTWRIGHT_FIELD = "cartwright-field"
    CROSS_WEIGHT = "cross-weight"
    REFINED_YOUNG = "refined-young"
    WEIGHT_CHANGE = "weight-change"
    VARIANCE_COMPARISON = "variance-comparison"


@dataclass(frozen=True)
class BoundReport:
    """A computed value with certified lower and upper bounds.

    ``gap`` is the AM-GM gap for every method except
    ``VARIANCE_COMPARISON``, where it carries ``Var_a(y)``.
    """

    gap: float
    lower: float
    upper: float
    slack_lower: float
    slack_upper: float
    tight_lower: bool
    tight_upper: bool
    method: Method

    @property
    def scale(self) -> float:
        return max(abs(self.gap), abs(self.lower), abs(self.upper))

    def holds(self, rtol: float = INVARIANT_RTOL) -> bool:
        tol = rtol * self.scale
        return self.slack_lower >= -tol and self.slack_upper >= -tol


def make_report(method: Method, gap: float, lower: float, upper: float, check: bool = True) -> BoundReport:
    gap, lower, upper = float(gap), float(lower), float(upper)
    slack_lo = gap - lower
    slack_hi = upper - gap
    tight = TIGHT_RTOL * max(abs(gap), abs(lower), abs(upper))
    report = BoundReport(
        gap=gap,
        lower=lower,
        upper=upper,
        slack_lower=slack_lo,
        slack_upper=slack_hi,
        tight_lower=abs(slack_lo) <= tight,
        tight_upper=abs(slack_hi) <= tight,
        method=Method(method),
    )
    if check and not report.holds():
        raise InvariantViolation(
            f"{report.method.value}: {lower!r} <= {gap!r} <= {upper!r} fails"
        )
    return report


def weight_ratio_extremes(a: Weights, b: Weights) -> tuple[float, float]:
    """(min_k a_k/b_k, max_k a_k/b_k)."""
    wa, wb = as_weights(a), as_weights(b)
    if len(wa) != len(wb):
        raise DimensionError(f"weight vectors have lengths {len(wa)} and {len(wb)}")
    r = [p / q for p, q in zip(wa.normalized, wb.normalized)]
    return min(r), max(r)


def amgm_gap(x: Data, a: Weights) -> float:
    """E_a x - G_a x (>= 0)."""
    xs, w = _pair(x, a)
    return _stable_gap(xs, w)


def theorem_bounds(x: Data, a: Weights) -> BoundReport:
    """Var_a(sqrt x)/(1 - a_min) <= E_a x - G_a x <= Var_a(sqrt x)/a_min.

    Zero entries are allowed.  For n = 2 the two sides coincide.
    """
    a = as_weights(a)
    xs, w = _pair(x, a)
    v = _sqrt_variance(xs, w)
    amin = a.min
    return make_report(Method.THEOREM, _stable_gap(xs, w), v / (1.0 - amin), v / amin)


def _half_sqrt_gap(x: float, y: float) -> float:
    # (x+y)/2 - sqrt(xy) = ((x - y)/(sqrt x + sqrt y))^2 / 2
    if x == y:
        return 0.0
    t = (x - y) / (math.sqrt(x) + math.sqrt(y))
    return 0.5 * t * t


def n2_identity_check(x: float, y: float) -> tuple[float, float]:
    """Both sides of (x+y)/2 - sqrt(xy) = 2 Var((sqrt x, sqrt y)), computed independently.

    The left side goes through the cancellation-free gap kernel, the right side
    through the variance kernel for square roots (which never rounds sqrt(x)
    itself, so near-equal pairs keep full relative accuracy).
    """
    x, y = float(x), float(y)
    if x < 0 or y < 0:
        raise DomainError("n2_identity_check needs x, y >= 0")
    lhs = _stable_gap((x, y), (0.5, 0.5))
    rhs = 2.0 * _sqrt_variance((x, y), (0.5, 0.5))
    return lhs, rhs


def refined_young_bounds(x: float, y: float, a: float) -> BoundReport:
    """2a((x+y)/2 - sqrt xy) <= ax + (1-a)y - x^a y^(1-a) <= 2(1-a)((x+y)/2 - sqrt xy).

    ``a`` must be the smaller weight, ``0 < a <= 1/2``; see
    :func:`refined_young_bounds_any` for the orientation-free wrapper.
    """
    x, y, a = float(x), float(y), float(a)
    if x < 0 or y < 0 or not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError("refined_young_bounds needs finite x, y >= 0")
    if not 0.0 < a <= 0.5:
        raise DomainError(f"weight a must lie in (0, 1/2], got {a!r}")
    gap = _stable_gap((x, y), (a, 1.0 - a))
    base = _half_sqrt_gap(x, y)
    return make_report(Method.REFINED_YOUNG, gap, 2.0 * a * base, 2.0 * (1.0 - a) * base)


def refined_young_bounds_any(x: float, y: float, a: float) -> BoundReport:
    """Same as :func:`refined_young_bounds` for any a in (0, 1); swaps roles when a > 1/2."""
    if 0.5 < a < 1.0:
        return refined_young_bounds(y, x, 1.0 - a)
    return refined_young_bounds(x, y, a)


def cartwright_field_bounds(x: Data, a: Weights) -> BoundReport:
    """Var_a(x)/(2 x_max) <= E_a x - G_a x <= Var_a(x)/(2 x_min), for x_min > 0."""
    xs, w = _pair(x, a)
    lo, hi = min(xs), max(xs)
    if lo <= 0.0:
        raise PreconditionError(
            "X_min must be > 0 for cartwright-field; theorem_bounds accepts zero entries"
        )
    v = _variance(xs, w)
    return make_report(Method.CARTWRIGHT_FIELD, _stable_gap(xs, w), v / (2.0 * hi), v / (2.0 * lo))


def weight_change_gap_bounds(x: Data, a: Weights, b: Weights) -> BoundReport:
    """r_min (E_b x - G_b x) <= E_a x - G_a x <= r_max (E_b x - G_b x), r = a/b."""
    rmin, rmax = weight_ratio_extremes(a, b)
    xs, wa = _pair(x, a)
    _, wb = _pair(xs, b)
    gb = _stable_gap(xs, wb)
    return make_report(Method.WEIGHT_CHANGE, _stable_gap(xs, wa), rmin * gb, rmax * gb)


def variance_comparison(y: Data, a: Weights, b: Weights) -> BoundReport:
    """r_min Var_b(y) <= Var_a(y) <= r_max Var_b(y) for any real y; ``gap`` holds Var_a(y)."""
    rmin, rmax = weight_ratio_extremes(a, b)
    ys, wa = _pair(y, a, signed=True)
    _, wb = _pair(ys, b, signed=True)
    vb = _variance(ys, wb)
    return make_report(Method.VARIANCE_COMPARISON, _variance(ys, wa), rmin * vb, rmax * vb)


def cross_weight_bounds(x: Data, a: Weights, b: Weights) -> BoundReport:
    """Bounds on the a-weighted gap from the b-weighted variance of sqrt(x).

    lower = r_min max{1/(1-a_min), 1/(1-b_min)} Var_b(sqrt x)
    upper = r_max min{1/a_min, 1/b_min} Var_b(sqrt x)
    """
    wa_, wb_ = as_weights(a), as_weights(b)
    rmin, rmax = weight_ratio_extremes(wa_, wb_)
    xs, wa = _pair(x, wa_)
    _, wb = _pair(xs, wb_)
    vb = _sqrt_variance(xs, wb)
    # both factors are monotone in the smallest weight, so one division each suffices;
    # with a == b this reproduces theorem_bounds bit for bit
    m = max(wa_.min, wb_.min)
    return make_report(
        Method.CROSS_WEIGHT, _stable_gap(xs, wa), rmin * (vb / (1.0 - m)), rmax * (vb / m)
    )


__all__ = [
    "BoundReport",
    "Method",
    "WeightVector",
    "amgm_gap",
    "cartwright_field_bounds",
    "cross_weight_bounds",
    "make_report",
    "n2_identity_check",
    "refined_young_bounds",
    "refined_young_bounds_any",
    "theorem_bounds",
    "variance_comparison",
    "weight_change_gap_bounds",
    "weight_ratio_extremes",
]
