import math

import numpy as np
import pytest

import oracle
from amgm_bounds import (
    DimensionError,
    DomainError,
    PreconditionError,
    SampledFunctionSet,
    WeightVector,
    holder_refinement,
    mazur_images,
    theorem_bounds,
)
from conftest import rel_close

R2 = math.sqrt(2.0)


def random_set(rng, n=None, m=None, floor=1e-3):
    n = n or int(rng.integers(2, 5))
    m = m or int(rng.integers(1, 65))
    q = rng.dirichlet(np.ones(n)) + floor
    q /= q.sum()
    ps = 1.0 / q
    masses = rng.uniform(0.0, 1.0, m)
    masses[0] += 0.1  # keep a positive total
    fs = rng.uniform(0.0, 2.0, (n, m)) ** rng.uniform(0.5, 3.0, (n, 1))
    fs[:, 0] += 0.05  # every norm positive
    return SampledFunctionSet(masses, fs, ps)


class TestValidation:
    def test_exponent_sum(self):
        with pytest.raises(PreconditionError, match="sum 1/p_i = 1"):
            SampledFunctionSet([1.0], [[1.0], [1.0]], [2.0, 3.0])

    def test_zero_norm(self):
        with pytest.raises(PreconditionError, match="zero"):
            SampledFunctionSet([1.0, 1.0], [[1.0, 1.0], [0.0, 0.0]], [2.0, 2.0])

    def test_zero_norm_via_massless_support(self):
        with pytest.raises(PreconditionError):
            SampledFunctionSet([0.0, 1.0], [[1.0, 0.0], [1.0, 1.0]], [2.0, 2.0])

    @pytest.mark.parametrize("ps", [(1.0, math.inf), (2e6, 1 / (1 - 1 / 2e6))])
    def test_exponent_range(self, ps):
        with pytest.raises(DomainError):
            SampledFunctionSet([1.0], [[1.0], [1.0]], ps)

    def test_negative_values(self):
        with pytest.raises(DomainError):
            SampledFunctionSet([1.0, 1.0], [[1.0, -1.0], [1.0, 1.0]], [2.0, 2.0])

    def test_shapes(self):
        with pytest.raises(DimensionError):
            SampledFunctionSet([1.0, 1.0], [[1.0], [1.0]], [2.0, 2.0])
        with pytest.raises(DimensionError):
            SampledFunctionSet([1.0], [[1.0], [1.0]], [2.0, 2.0, 2.0])

    def test_arrays_are_read_only(self):
        s = SampledFunctionSet([1.0], [[1.0], [1.0]], [2.0, 2.0])
        with pytest.raises(ValueError):
            s.functions[0, 0] = 3.0


class TestMazurImages:
    def test_constant_functions(self):
        s = SampledFunctionSet([0.25] * 4, np.ones((3, 4)), [3.0, 3.0, 3.0])
        assert np.array_equal(mazur_images(s), np.ones((3, 4)))

    def test_two_point_example(self):
        s = SampledFunctionSet([0.5, 0.5], [[R2, 0.0], [R2, R2]], [2.0, 2.0])
        g = mazur_images(s)
        assert g[0] == pytest.approx([R2, 0.0], rel=1e-15)
        assert math.fsum(s.masses * g[0] ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_unit_l2_norms(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            s = random_set(rng)
            g = mazur_images(s)
            for gi in g:
                assert math.fsum(s.masses * gi**2) == pytest.approx(1.0, abs=1e-12)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(2)
        s = random_set(rng, n=3, m=10)
        c = np.array([[1e-3], [7.0], [1e4]])
        t = SampledFunctionSet(s.masses, s.functions * c, s.exponents)
        assert np.allclose(mazur_images(t), mazur_images(s), rtol=1e-12, atol=0)


class TestEqualityCases:
    def test_constant_functions(self):
        r = holder_refinement(SampledFunctionSet([0.5, 0.5], np.ones((2, 2)), [2.0, 2.0]))
        assert r.mazur_distance == 0.0
        assert r.lower == r.product_norm == r.upper == r.classical_upper == 1.0
        assert not r.vacuous_lower

    def test_disjoint_support(self):
        r = holder_refinement(SampledFunctionSet([0.5, 0.5], [[R2, 0.0], [0.0, R2]], [2.0, 2.0]))
        assert r.product_norm == 0.0
        assert r.mazur_distance == pytest.approx(0.5, rel=1e-15)
        # sqrt(2)^2 rounds to 2 + 4e-16, so the norms are one ulp above 1
        assert abs(r.lower) <= 1e-15 and abs(r.upper) <= 1e-15

    def test_disjoint_support_exact(self):
        r = holder_refinement(SampledFunctionSet([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], [2.0, 2.0]))
        assert (r.product_norm, r.mazur_distance, r.lower, r.upper) == (0.0, 0.5, 0.0, 0.0)
        assert r.norms == (1.0, 1.0)
        assert r.vacuous_lower


def brute_force(s):
    """Direct float evaluation, straight from the definitions."""
    mu, fs, ps = s.masses, s.functions, s.exponents
    norms = [f.max() * np.sum(mu * (f / f.max()) ** p) ** (1 / p) for f, p in zip(fs, ps)]
    g = [(f / nrm) ** (p / 2) for f, p, nrm in zip(fs, ps, norms)]
    h = sum(gi / p for gi, p in zip(g, ps))
    dist = sum(np.sum(mu * (gi - h) ** 2) / p for gi, p in zip(g, ps))
    prod = np.sum(mu * np.prod(fs, axis=0))
    classical = np.prod(norms)
    pmax = ps.max()
    return prod, dist, classical * max(0.0, 1 - pmax * dist), classical * (1 - pmax / (pmax - 1) * dist), classical


def test_random_sandwich_and_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        s = random_set(rng)
        r = holder_refinement(s)
        assert r.holds(1e-10)
        prod, dist, lower, upper, classical = brute_force(s)
        assert r.product_norm == pytest.approx(prod, rel=1e-12)
        assert r.classical_upper == pytest.approx(classical, rel=1e-12)
        assert r.mazur_distance == pytest.approx(dist, rel=1e-9, abs=1e-14)
        for got, ref in ((r.lower, lower), (r.upper, upper)):
            assert got == pytest.approx(ref, abs=1e-12 * classical)


def test_oracle_agreement():
    rng = np.random.default_rng(4)
    for _ in range(60):
        s = random_set(rng, m=int(rng.integers(1, 16)))
        r = holder_refinement(s)
        prod, norms, dist, lower, upper, classical = oracle.holder(
            s.masses.tolist(), s.functions.tolist(), s.exponents.tolist()
        )
        assert rel_close(r.product_norm, prod, 1e-12)
        assert rel_close(r.classical_upper, classical, 1e-12)
        assert all(rel_close(a, b, 1e-13) for a, b in zip(r.norms, norms))
        assert abs(r.mazur_distance - dist) <= 1e-13 * max(1.0, abs(dist))
        assert abs(r.lower - lower) <= 1e-12 * classical
        assert abs(r.upper - upper) <= 1e-12 * classical


def test_upper_dominated_by_classical():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        r = holder_refinement(random_set(rng))
        assert r.upper <= r.classical_upper
        assert (r.upper == pytest.approx(r.classical_upper, rel=1e-12)) == (r.mazur_distance <= 1e-12)
        assert r.upper >= 0.0 or abs(r.upper) <= 1e-10 * r.classical_upper


def test_scale_invariance():
    rng = np.random.default_rng(6)
    for _ in range(300):
        s = random_set(rng)
        c = 10.0 ** rng.uniform(-3, 3, (s.n, 1))
        t = SampledFunctionSet(s.masses, s.functions * c, s.exponents)
        r, q = holder_refinement(s), holder_refinement(t)
        k = float(np.prod(c))
        assert q.mazur_distance == pytest.approx(r.mazur_distance, rel=1e-10, abs=1e-15)
        for u, v in ((q.product_norm, r.product_norm), (q.upper, r.upper), (q.lower, r.lower)):
            assert u == pytest.approx(k * v, rel=1e-10, abs=1e-12 * q.classical_upper)


def test_single_point_space():
    # one atom of mass 1: every x_i equals 1, D = 0 and theorem_bounds sees constant data
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        ps = 1.0 / np.array(WeightVector.normalize(rng.uniform(0.1, 1.0, n)).normalized)
        f = rng.uniform(0.1, 5.0, (n, 1))
        s = SampledFunctionSet([1.0], f, ps)
        r = holder_refinement(s)
        x = [float(v) for v in (f[:, 0] / s.norms) ** ps]
        t = theorem_bounds(x, WeightVector.normalize(1.0 / ps))
        assert r.mazur_distance == pytest.approx(t.lower * (1 - min(1.0 / ps)), abs=1e-12)
        assert 1.0 - r.product_norm / r.classical_upper == pytest.approx(t.gap, abs=1e-12)


def test_pointwise_consistency_with_theorem():
    # D and 1 - prod/classical are mass averages of the pointwise Var and gap;
    # moderate exponents keep (f/||f||)^p clear of underflow
    rng = np.random.default_rng(8)
    for _ in range(300):
        s = random_set(rng, floor=0.1)
        r = holder_refinement(s)
        alpha = WeightVector.normalize(1.0 / s.exponents)
        xs = (s.functions / s.norms[:, None]) ** s.exponents[:, None]
        var_sum = gap_sum = 0.0
        for j, m in enumerate(s.masses):
            t = theorem_bounds([float(v) for v in xs[:, j]], alpha)
            var_sum += m * t.lower * (1 - alpha.min)
            gap_sum += m * t.gap
        assert r.mazur_distance == pytest.approx(var_sum, rel=1e-9, abs=1e-12)
        assert 1.0 - r.product_norm / r.classical_upper == pytest.approx(gap_sum, rel=1e-9, abs=1e-12)


def test_log_domain_norm():
    s = SampledFunctionSet([1.0, 1.0], [[1e-200, 1e100], [1.0, 1.0]], [2.0, 2.0])
    assert s.norms[0] == pytest.approx(1e100, rel=1e-14)
    r = holder_refinement(s)
    assert r.holds()
