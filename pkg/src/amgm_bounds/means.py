"""Weighted means, geometric means and variances with careful floating point.

All reductions go through :func:`math.fsum`, so every dot product is
correctly rounded.  Weights are stored as given but every computation uses
``a_i / fsum(a)``, which makes a vector that sums to ``1 + 1e-13`` behave as
the probability vector it approximates.

Two quantities get special treatment because the textbook formulas cancel
catastrophically on nearly constant data:

* the AM-GM gap ``E_a x - G_a x`` (see :func:`stable_gap`), and
* the variance of the square roots ``Var_a(sqrt(x))`` (see :func:`sqrt_variance`).

Both are evaluated in coordinates relative to the mean, where the small
quantities are formed directly instead of as differences of large ones.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from math import fsum
from typing import Iterable, Sequence, Union

from .errors import DimensionError, DomainError, InvariantViolation

WEIGHT_SUM_TOL = 1e-12

_TINY = sys.float_info.min
# |d| below this uses the series for d - log1p(d)
_SERIES_CUTOFF = 0.5


def _floats(values: Iterable[float], what: str) -> tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{what} must be a sequence of real numbers") from exc
    if len(out) < 2:
        raise DomainError(f"{what} needs at least 2 entries, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise DomainError(f"{what} entries must be finite")
    return out


@dataclass(frozen=True)
class WeightVector:
    """Strictly positive weights summing to one (within ``1e-12``)."""

    values: tuple[float, ...]
    normalized: tuple[float, ...] = field(init=False, repr=False, compare=False)
    min: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vals = _floats(self.values, "weights")
        if any(v <= 0.0 for v in vals):
            raise DomainError("weights must be strictly positive")
        total = fsum(vals)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(
                f"weights must sum to 1 (got {total!r}); use WeightVector.normalize to rescale"
            )
        object.__setattr__(self, "values", vals)
        object.__setattr__(
            self, "normalized", vals if total == 1.0 else tuple(v / total for v in vals)
        )
        object.__setattr__(self, "min", min(vals))

    @classmethod
    def equal(cls, n: int) -> "WeightVector":
        if n < 2:
            raise DomainError(f"n must be >= 2, got {n}")
        return cls((1.0 / n,) * n)

    @classmethod
    def normalize(cls, values: Iterable[float]) -> "WeightVector":
        """Rescale arbitrary positive values so they sum to one."""
        vals = _floats(values, "weights")
        if any(v <= 0.0 for v in vals):
            raise DomainError("weights must be strictly positive")
        total = fsum(vals)
        return cls(tuple(v / total for v in vals))

    @property
    def max(self) -> float:
        return max(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class DataVector:
    """Non-negative data ``x = (x_1, ..., x_n)``, n >= 2."""

    entries: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = _floats(self.entries, "data")
        if any(v < 0.0 for v in vals):
            raise DomainError("data entries must be >= 0")
        object.__setattr__(self, "entries", vals)

    @property
    def min(self) -> float:
        return min(self.entries)

    @property
    def max(self) -> float:
        return max(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


Data = Union[DataVector, Sequence[float]]
Weights = Union[WeightVector, Sequence[float]]


def as_weights(a: Weights) -> WeightVector:
    return a if isinstance(a, WeightVector) else WeightVector(tuple(a))


def as_data(x: Data) -> DataVector:
    return x if isinstance(x, DataVector) else DataVector(tuple(x))


def _pair(x: Data, a: Weights, signed: bool = False) -> tuple[tuple[float, ...], tuple[float, ...]]:
    xs = _floats(x, "data") if signed else as_data(x).entries
    w = as_weights(a)
    if len(xs) != len(w):
        raise DimensionError(f"data has {len(xs)} entries but weights have {len(w)}")
    return xs, w.normalized


# -- raw kernels on float tuples (no validation) ------------------------------


def _mean(xs: Sequence[float], w: Sequence[float]) -> float:
    m = fsum([wi * xi for wi, xi in zip(w, xs)])
    lo, hi = min(xs), max(xs)
    return lo if m < lo else hi if m > hi else m


def _geometric_mean(xs: Sequence[float], w: Sequence[float]) -> float:
    top = max(xs)
    if min(xs) == 0.0:
        return 0.0
    log_top = math.log(top)
    logs = []
    for wi, xi in zip(w, xs):
        r = xi / top
        logs.append(wi * (math.log(r) if r >= _TINY else math.log(xi) - log_top))
    return top * math.exp(fsum(logs))


def _log1p_excess_series(d: float) -> float:
    """d - log1p(d) for |d| < 0.5 without cancellation.

    Uses log1p(d) = 2 atanh(u) with u = d / (2 + d), so that
    d - log1p(d) = d^2/(2+d) - 2 (u^3/3 + u^5/5 + ...), |u| <= 1/3.
    """
    u = d / (2.0 + d)
    u2 = u * u
    t = u * u2
    acc = 0.0
    k = 3.0
    while True:
        term = t / k
        acc += term
        if abs(term) <= 1e-17 * abs(acc):
            break
        t *= u2
        k += 2.0
    return d * d / (2.0 + d) - 2.0 * acc


def _expm1_excess_series(z: float) -> float:
    """expm1(z) - z for |z| < 0.5."""
    term = z * z / 2.0
    acc = term
    k = 3.0
    while abs(term) > 1e-17 * abs(acc):
        term *= z / k
        acc += term
        k += 1.0
    return acc


def _stable_gap(xs: Sequence[float], w: Sequence[float]) -> float:
    """E_w x - G_w x, accurate to a few ulps even when the gap is tiny.

    With c the computed mean and d_i = (x_i - c)/c,
        gap / c = s - expm1(s - q),   s = sum w_i d_i,  q = sum w_i (d_i - log1p d_i)
    which holds for any reference c.  q is a sum of non-negative terms, s is
    only a rounding residue, and for small q we expand expm1(z) = z + psi(z)
    to get gap / c = q - psi(s - q) with no cancellation.
    """
    lo, hi = min(xs), max(xs)
    if lo == hi:
        return 0.0
    c = _mean(xs, w)
    if lo == 0.0:
        return c
    log_c = math.log(c)
    ds = []
    phis = []
    for xi in xs:
        d = (xi - c) / c
        ds.append(d)
        if -_SERIES_CUTOFF < d < _SERIES_CUTOFF:
            phis.append(_log1p_excess_series(d))
        else:
            r = xi / c
            phis.append(d - (math.log(r) if r >= _TINY else math.log(xi) - log_c))
    s = fsum([wi * di for wi, di in zip(w, ds)])
    q = fsum([wi * pi for wi, pi in zip(w, phis)])
    z = s - q
    if -0.5 < z < 0.5:
        g = q - _expm1_excess_series(z)
    else:
        g = s - math.expm1(z)
    return c * g if g > 0.0 else 0.0


def _variance(ys: Sequence[float], w: Sequence[float]) -> float:
    lo, hi = min(ys), max(ys)
    if lo == hi:
        return 0.0
    m = fsum([wi * yi for wi, yi in zip(w, ys)])
    dev = [yi - m for yi in ys]
    # corrected two-pass: the second sum removes the first-order error in m
    v = fsum([wi * di * di for wi, di in zip(w, dev)]) - fsum([wi * di for wi, di in zip(w, dev)]) ** 2
    if v < 0.0:
        if v < -1e-15 * fsum([wi * yi * yi for wi, yi in zip(w, ys)]):
            raise InvariantViolation(f"variance evaluated to {v!r}")
        return 0.0
    return v


def _sqrt_variance(xs: Sequence[float], w: Sequence[float]) -> float:
    """Var_w(sqrt(x)) computed from e_i = sqrt(x_i/c) - 1, c the mean.

    sqrt(x_i) = sqrt(c) (1 + e_i) and variance ignores shifts, so the result
    is c * Var_w(e).  e_i = d_i / (1 + sqrt(1 + d_i)) is accurate to working
    precision even when x_i is within a few ulps of c.
    """
    lo, hi = min(xs), max(xs)
    if lo == hi:
        return 0.0
    c = _mean(xs, w)
    es = [((xi - c) / c) / (1.0 + math.sqrt(xi / c)) for xi in xs]
    return c * _variance(es, w)


# -- public API ----------------------------------------------------------------


def weighted_mean(x: Data, a: Weights) -> float:
    """E_a x = sum a_i x_i.  Entries may be signed."""
    xs, w = _pair(x, a, signed=True)
    return _mean(xs, w)


def weighted_geometric_mean(x: Data, a: Weights) -> float:
    """G_a x = prod x_i^{a_i}, evaluated in the log domain; 0 if any x_i = 0."""
    xs, w = _pair(x, a)
    return _geometric_mean(xs, w)


def weighted_variance(y: Data, a: Weights) -> float:
    """Var_a y = sum a_i (y_i - E_a y)^2.  Entries may be signed."""
    ys, w = _pair(y, a, signed=True)
    return _variance(ys, w)


def sqrt_transform(x: Data) -> DataVector:
    return DataVector(tuple(math.sqrt(v) for v in as_data(x)))


def sqrt_variance(x: Data, a: Weights) -> float:
    """Var_a(x^{1/2}); equal to ``weighted_variance(sqrt_transform(x), a)`` but stable."""
    xs, w = _pair(x, a)
    return _sqrt_variance(xs, w)


def std_dev(x: Data, a: Weights) -> float:
    return math.sqrt(weighted_variance(x, a))


def stable_gap(x: Data, a: Weights) -> float:
    """E_a x - G_a x without cancellation (never negative)."""
    xs, w = _pair(x, a)
    return _stable_gap(xs, w)
