"""Equality witnesses and numerical search for extremal gap/variance ratios.

The ratio (E_a x - G_a x) / Var_a(sqrt x) always lies in
[1/(1 - a_min), 1/a_min].  This module produces points attaining the ends of
that interval and runs a derivative-free search over the slice
{x >= 0 : E_a x = 1} to check that nothing beats them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, DomainError, InvariantViolation
from .means import (
    Data,
    DataVector,
    Weights,
    WeightVector,
    _pair,
    _sqrt_variance,
    _stable_gap,
    as_weights,
    stable_gap,
    std_dev,
)

SNAP_TO_ZERO = 1e-12
MIN_VARIANCE = 1e-16
SOUNDNESS_RTOL = 1e-6

_HALVES = WeightVector((0.5, 0.5))


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Direction(str, enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


def equality_witness(n: int, side: Side | str) -> DataVector:
    """Equal-weight witness: LEFT -> (1, 0, ..., 0), RIGHT -> (1, ..., 1, 0)."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    side = Side(side)
    n = int(n)
    if side is Side.LEFT:
        return DataVector((1.0,) + (0.0,) * (n - 1))
    return DataVector((1.0,) * (n - 1) + (0.0,))


def weighted_witness(a: Weights, side: Side | str) -> DataVector:
    """Witness for arbitrary weights, built around the index of the smallest weight.

    LEFT puts the only non-zero entry there; RIGHT puts the only zero there.
    """
    a = as_weights(a)
    side = Side(side)
    j = a.values.index(a.min)
    n = len(a)
    if side is Side.LEFT:
        return DataVector(tuple(1.0 if i == j else 0.0 for i in range(n)))
    return DataVector(tuple(0.0 if i == j else 1.0 for i in range(n)))


def target(a: Weights, direction: Direction | str) -> float:
    a = as_weights(a)
    if Direction(direction) is Direction.MAXIMIZE:
        return 1.0 / a.min
    return 1.0 / (1.0 - a.min)


def ratio(x: Data, a: Weights) -> float:
    """(E_a x - G_a x) / Var_a(sqrt x) for non-constant x."""
    xs, w = _pair(x, a)
    v = _sqrt_variance(xs, w)
    if v <= 0.0:
        raise DegenerateInputError("ratio is 0/0 on a constant vector")
    return _stable_gap(xs, w) / v


def sigma_impossibility_curve(epsilons: Sequence[float]) -> list[tuple[float, float]]:
    """(sigma, gap) for x = (1 + eps, 1 - eps) under equal weights.

    gap / sigma -> 0 as eps -> 0, so no bound c * sigma <= gap can hold.
    """
    out = []
    for eps in epsilons:
        eps = float(eps)
        if not 0.0 < eps < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {eps!r}")
        x = (1.0 + eps, 1.0 - eps)
        out.append((std_dev(x, _HALVES), stable_gap(x, _HALVES)))
    return out


@dataclass(frozen=True)
class SearchConfig:
    weights: WeightVector
    n_starts: int = 32
    max_iters: int = 2000
    step_tolerance: float = 1e-10
    direction: Direction = Direction.MAXIMIZE
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", as_weights(self.weights))
        object.__setattr__(self, "direction", Direction(self.direction))
        if int(self.n_starts) != self.n_starts or self.n_starts < 1:
            raise DomainError("n_starts must be a positive integer")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise DomainError("max_iters must be a positive integer")
        if not self.step_tolerance > 0:
            raise DomainError("step_tolerance must be > 0")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SearchResult:
    best_ratio: float
    argpoint: DataVector
    target: float
    relative_gap_to_target: float
    n_evaluations: int
    n_iterations: int
    direction: Direction
    weights: tuple[float, ...]
    start_ratios: tuple[float, ...] = field(default=())


def _objective(xs: list[float], w: Sequence[float]) -> Optional[float]:
    v = _sqrt_variance(xs, w)
    if v < MIN_VARIANCE * max(xs) or v <= 0.0:
        return None
    return _stable_gap(xs, w) / v


def _normalize(xs: list[float], w: Sequence[float]) -> list[float]:
    m = math.fsum([wi * xi for wi, xi in zip(w, xs)])
    return [xi / m for xi in xs]


def _pattern_search(x: list[float], w: Sequence[float], sign: float, cfg: SearchConfig):
    """Compass search along coordinate axes with clamping at zero.

    Returns (point, ratio, evaluations, sweeps).  ``sign`` is +1 to maximise
    and -1 to minimise.
    """
    n = len(x)
    f = _objective(x, w)
    evals = 1
    step = 0.25
    sweeps = 0
    for sweeps in range(1, cfg.max_iters + 1):
        moved = False
        for i in range(n):
            for delta in (step, -step):
                xi = x[i] + delta
                if xi < SNAP_TO_ZERO:
                    xi = 0.0
                if xi == x[i]:
                    continue
                y = x.copy()
                y[i] = xi
                fy = _objective(y, w)
                evals += 1
                if fy is not None and (f is None or sign * (fy - f) > 0.0):
                    x = _normalize(y, w)
                    f = fy
                    moved = True
                    break
        if not moved:
            step *= 0.5
            if step < cfg.step_tolerance:
                break
    return x, f, evals, sweeps


def search_extremal(cfg: SearchConfig) -> SearchResult:
    """Multi-start compass search for the extreme ratio on {x >= 0 : E_a x = 1}.

    Starts are Dirichlet(1, ..., 1) draws from ``numpy.random.default_rng(seed)``,
    so a fixed config gives a bit-identical result.  Ties go to the lowest
    start index.
    """
    a = cfg.weights
    w = a.normalized
    n = len(a)
    sign = 1.0 if cfg.direction is Direction.MAXIMIZE else -1.0
    rng = np.random.default_rng(cfg.seed)
    starts = rng.dirichlet(np.ones(n), size=cfg.n_starts)

    best_x, best_f = None, None
    total_evals = total_sweeps = 0
    start_ratios = []
    for start in starts:
        x0 = _normalize([float(v) for v in start], w)
        x, f, evals, sweeps = _pattern_search(x0, w, sign, cfg)
        total_evals += evals
        total_sweeps += sweeps
        start_ratios.append(float("nan") if f is None else f)
        if f is not None and (best_f is None or sign * (f - best_f) > 0.0):
            best_x, best_f = x, f
    if best_f is None:
        raise DegenerateInputError("every start collapsed to a constant vector")

    tgt = target(a, cfg.direction)
    lo, hi = 1.0 / (1.0 - a.min), 1.0 / a.min
    if best_f > hi * (1 + SOUNDNESS_RTOL) or best_f < lo * (1 - SOUNDNESS_RTOL):
        raise InvariantViolation(
            f"search found ratio {best_f!r} outside [{lo!r}, {hi!r}]"
        )
    return SearchResult(
        best_ratio=best_f,
        argpoint=DataVector(tuple(best_x)),
        target=tgt,
        relative_gap_to_target=(best_f - tgt) / tgt,
        n_evaluations=total_evals,
        n_iterations=total_sweeps,
        direction=cfg.direction,
        weights=a.values,
        start_ratios=tuple(start_ratios),
    )


def distinct_values(x: Data, tol: float = 1e-6) -> list[float]:
    """Cluster the entries of ``x`` (relative to its max) and return one value per cluster."""
    xs = sorted(float(v) for v in x)
    scale = max(abs(xs[-1]), 1.0)
    groups = [xs[0]]
    for v in xs[1:]:
        if v - groups[-1] > tol * scale:
            groups.append(v)
    return groups
