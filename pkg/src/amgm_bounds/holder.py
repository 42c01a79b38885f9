"""Refined Hölder inequality on a finite (discrete) measure space.

For non-negative f_1..f_n with conjugate exponents (sum 1/p_i = 1), the
normalised powers g_i = f_i^{p_i/2} / ||f_i||_{p_i}^{p_i/2} are unit vectors in
L^2.  With h = sum g_k / p_k and D = sum (1/p_i) ||g_i - h||_2^2,

    prod ||f_i||_{p_i} (1 - p_max D)_+  <=  ||prod f_i||_1
                                        <=  prod ||f_i||_{p_i} (1 - p_max/(p_max - 1) D).

Integrals over a continuum are the caller's business: pass quadrature
weights as ``masses``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import fsum

import numpy as np

from .errors import DimensionError, DomainError, InvariantViolation, PreconditionError

EXPONENT_SUM_TOL = 1e-12
MAX_EXPONENT = 1e6
INVARIANT_RTOL = 1e-10
# dynamic range beyond which norms are taken in the log domain
_LOG_DOMAIN_RANGE = 1e150


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledFunctionSet:
    """n non-negative functions sampled on the support of a discrete measure."""

    masses: np.ndarray
    functions: np.ndarray
    exponents: np.ndarray
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        mu = np.array(self.masses, dtype=float).ravel()
        fs = np.array(self.functions, dtype=float)
        ps = np.array(self.exponents, dtype=float).ravel()
        if fs.ndim != 2:
            raise DimensionError("functions must be a 2-d array (one row per function)")
        n, m = fs.shape
        if n < 2:
            raise DomainError(f"need at least 2 functions, got {n}")
        if m != mu.size:
            raise DimensionError(f"functions have {m} samples but there are {mu.size} masses")
        if ps.size != n:
            raise DimensionError(f"{ps.size} exponents for {n} functions")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(fs)) and np.all(np.isfinite(ps))):
            raise DomainError("masses, functions and exponents must be finite")
        if np.any(mu < 0) or not fsum(mu.tolist()) > 0:
            raise DomainError("masses must be >= 0 with a positive total")
        if np.any(fs < 0):
            raise DomainError("function values must be >= 0")
        if np.any(ps <= 1.0) or np.any(ps > MAX_EXPONENT):
            raise DomainError(f"exponents must lie in (1, {MAX_EXPONENT:g}]")
        conj = fsum((1.0 / ps).tolist())
        if abs(conj - 1.0) > EXPONENT_SUM_TOL:
            raise PreconditionError(
                f"exponents must satisfy sum 1/p_i = 1 (got {conj!r})"
            )
        norms = np.array([_lp_norm(mu, f, p) for f, p in zip(fs, ps)])
        if np.any(norms <= 0):
            bad = [i for i, v in enumerate(norms) if v <= 0]
            raise PreconditionError(f"functions {bad} have zero L^p norm")
        object.__setattr__(self, "masses", _readonly(mu))
        object.__setattr__(self, "functions", _readonly(fs))
        object.__setattr__(self, "exponents", _readonly(ps))
        object.__setattr__(self, "norms", _readonly(norms))

    @property
    def n(self) -> int:
        return self.functions.shape[0]

    @property
    def p_max(self) -> float:
        return float(self.exponents.max())


def _lp_norm(mu: np.ndarray, f: np.ndarray, p: float) -> float:
    support = (mu > 0) & (f > 0)
    if not support.any():
        return 0.0
    fm, ff = mu[support], f[support]
    top = ff.max()
    if top / ff.min() > _LOG_DOMAIN_RANGE:
        # log of each term relative to the largest value; the top term is exact
        lv = np.log(fm) + p * (np.log(ff) - math.log(top))
        peak = lv.max()
        return top * math.exp((peak + math.log(fsum(np.exp(lv - peak).tolist()))) / p)
    return top * fsum((fm * (ff / top) ** p).tolist()) ** (1.0 / p)


def mazur_images(s: SampledFunctionSet) -> np.ndarray:
    """Rows g_i = (f_i / ||f_i||_{p_i})^{p_i/2}; each has unit L^2 norm."""
    ratios = s.functions / s.norms[:, None]
    return ratios ** (s.exponents[:, None] / 2.0)


@dataclass(frozen=True)
class HolderReport:
    product_norm: float
    norms: tuple[float, ...]
    mazur_distance: float
    lower: float
    upper: float
    classical_upper: float
    vacuous_lower: bool

    def holds(self, rtol: float = INVARIANT_RTOL) -> bool:
        tol = rtol * self.classical_upper
        return (
            self.mazur_distance >= 0.0
            and self.lower <= self.product_norm + tol
            and self.product_norm <= self.upper + tol
            and self.upper <= self.classical_upper + tol
            and self.upper >= -tol
        )


def holder_refinement(s: SampledFunctionSet) -> HolderReport:
    """Evaluate both sides of the refined Hölder sandwich on ``s``."""
    mu = s.masses
    g = mazur_images(s)
    inv_p = 1.0 / s.exponents
    h = inv_p @ g
    dist = fsum(
        [q * fsum((mu * (gi - h) ** 2).tolist()) for q, gi in zip(inv_p.tolist(), g)]
    )
    # product of the normalised functions; multiplying back by the norms last avoids overflow
    unit = np.prod(s.functions / s.norms[:, None], axis=0)
    classical = math.prod(s.norms.tolist())
    product = classical * fsum((mu * unit).tolist())
    pmax = s.p_max
    lo_factor = 1.0 - pmax * dist
    report = HolderReport(
        product_norm=product,
        norms=tuple(s.norms.tolist()),
        mazur_distance=dist,
        lower=classical * max(lo_factor, 0.0),
        upper=classical * (1.0 - pmax / (pmax - 1.0) * dist),
        classical_upper=classical,
        vacuous_lower=lo_factor <= 0.0,
    )
    if not report.holds():
        raise InvariantViolation(
            f"refined Hölder sandwich broken: {report.lower!r} <= {report.product_norm!r} "
            f"<= {report.upper!r} <= {report.classical_upper!r}"
        )
    return report
