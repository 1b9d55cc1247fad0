import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochbbm.dynamics import EquationParams
from stochbbm.errors import ConfigError
from stochbbm.integrator import integrate
from stochbbm.noise import (NoiseModel, NoisePath, apply_random_translation, coarsen_path,
                            normal_stream, path_from_normals, read_path_csv, sample_path,
                            truncate_path, write_path_csv)
from stochbbm.spectral import Grid, sobolev_norm, to_physical, to_spectral

TWO_PI = 2 * np.pi


class TestNoiseModel:
    def test_aggregation_exact(self):
        assert NoiseModel.from_gammas((0.1, 0.1)).gamma_sq_sum == 0.02
        assert NoiseModel.from_gammas((0.3, 0.4)).gamma_sq_sum == 0.25
        assert NoiseModel.from_gammas(()).gamma_sq_sum == 0.0

    @pytest.mark.parametrize("g2", [-1.0, math.inf, math.nan])
    def test_invalid(self, g2):
        with pytest.raises(ConfigError):
            NoiseModel(g2)

    @pytest.mark.parametrize("g", [math.inf, math.nan])
    def test_invalid_gammas(self, g):
        with pytest.raises(ConfigError):
            NoiseModel.from_gammas((0.1, g))

    def test_gamma(self):
        assert NoiseModel(0.04).gamma == pytest.approx(0.2)


class TestSamplePath:
    def test_zero_noise(self):
        p = sample_path(NoiseModel(0.0), 1.0, 2**-6, seed=1)
        assert np.all(p.increments == 0) and np.all(p.cumulative == 0)

    def test_starts_at_zero_and_cumulates(self):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-6, seed=3)
        assert p.cumulative[0] == 0.0
        assert np.allclose(np.diff(p.cumulative), p.increments, atol=1e-15)
        assert p.n_steps == 64 and p.horizon == 1.0

    def test_variance(self):
        # standard error of the sample variance is sqrt(2/n) ~ 0.45%
        dt = 1e-3
        p = sample_path(NoiseModel(0.04), 100.0, dt, seed=11)
        assert p.n_steps == 100_000
        assert np.var(p.increments) == pytest.approx(0.04 * dt, rel=0.05)
        assert abs(np.mean(p.increments)) < 5 * math.sqrt(0.04 * dt / p.n_steps)

    def test_deterministic(self):
        a = sample_path(NoiseModel(0.04), 1.0, 2**-8, seed=5, member=2)
        b = sample_path(NoiseModel(0.04), 1.0, 2**-8, seed=5, member=2)
        assert np.array_equal(a.increments, b.increments)
        assert np.array_equal(a.cumulative, b.cumulative)

    def test_members_independent(self):
        a = sample_path(NoiseModel(1.0), 1.0, 2**-10, seed=5, member=0)
        b = sample_path(NoiseModel(1.0), 1.0, 2**-10, seed=5, member=1)
        assert abs(np.corrcoef(a.increments, b.increments)[0, 1]) < 0.15

    def test_stream_order_free(self):
        # member 3 alone equals member 3 drawn after others
        z3 = normal_stream(9, 3).standard_normal(10)
        for m in range(3):
            normal_stream(9, m).standard_normal(10)
        assert np.array_equal(normal_stream(9, 3).standard_normal(10), z3)

    @pytest.mark.parametrize("T,dt", [(1.0, 0.0), (1.0, -0.1), (0.0, 0.1), (1.0, 0.3)])
    def test_invalid(self, T, dt):
        with pytest.raises(ConfigError):
            sample_path(NoiseModel(0.04), T, dt, seed=0)


class TestCoarsen:
    def test_factor_one(self):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-4, seed=2)
        q = coarsen_path(p, 1)
        assert np.array_equal(p.increments, q.increments) and q.dt == p.dt

    def test_definition(self):
        p = NoisePath.from_increments(0.25, [1.0, 2.0, 3.0, 4.0])
        q = coarsen_path(p, 2)
        assert list(q.increments) == [3.0, 7.0] and q.dt == 0.5
        assert list(q.cumulative) == [0.0, 3.0, 10.0]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31), st.sampled_from([1, 2, 4, 8, 16]))
    def test_shared_times(self, seed, factor):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-8, seed=seed)
        q = coarsen_path(p, factor)
        assert q.cumulative[-1] == p.cumulative[-1]
        assert np.max(np.abs(q.cumulative - p.cumulative[::factor])) <= 1e-15
        assert np.allclose(np.cumsum(q.increments), q.cumulative[1:], atol=1e-15)

    @pytest.mark.parametrize("factor", [0, 3, 2.5])
    def test_invalid(self, factor):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-3, seed=2)
        with pytest.raises(ConfigError):
            coarsen_path(p, factor)

    def test_truncate(self):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-4, seed=2)
        q = truncate_path(p, 5)
        assert q.n_steps == 5 and np.array_equal(q.cumulative, p.cumulative[:6])


class TestTranslation:
    def setup_method(self):
        self.g = Grid(TWO_PI, 32)
        self.u = to_spectral(self.g, np.cos(self.g.x) + 0.3 * np.sin(4 * self.g.x))

    def test_zero_and_full_period(self):
        assert np.allclose(apply_random_translation(self.u, 0.0).coeffs, self.u.coeffs, atol=0)
        assert np.allclose(apply_random_translation(self.u, TWO_PI).coeffs, self.u.coeffs,
                           atol=1e-14)

    def test_quarter_period(self):
        u = to_spectral(self.g, np.cos(self.g.x))
        out = to_physical(apply_random_translation(u, np.pi / 2))
        assert np.allclose(out, -np.sin(self.g.x), atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 4))
    def test_isometry_and_group(self, b1, b2, sigma):
        rng = np.random.default_rng(0)
        u = to_spectral(self.g, rng.standard_normal(32))
        a = apply_random_translation(apply_random_translation(u, b1), b2)
        b = apply_random_translation(u, b1 + b2)
        n0 = sobolev_norm(u, sigma)
        assert abs(sobolev_norm(a, sigma) - n0) <= 1e-12 * n0
        # the phase of a sum is accurate to |b1 + b2| * xi_max * eps
        assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12 * max(1.0, abs(b1) + abs(b2))


class TestAggregationConsistency:
    def test_gammas_vs_gamma_sq_bit_identical(self):
        z = normal_stream(42).standard_normal(64)
        pa = path_from_normals(NoiseModel.from_gammas((0.1, 0.1)), 2**-6, z)
        pb = path_from_normals(NoiseModel(0.02), 2**-6, z)
        assert np.array_equal(pa.increments, pb.increments)
        g = Grid(8 * np.pi, 64)
        u0 = to_spectral(g, 0.2 * np.exp(-(g.x - 4 * np.pi) ** 2))
        ta = integrate(u0, pa, EquationParams(gamma_sq=NoiseModel.from_gammas((0.1, 0.1)).gamma_sq_sum))
        tb = integrate(u0, pb, EquationParams(gamma_sq=0.02))
        assert np.array_equal(ta.states, tb.states)


class TestCsv:
    def test_roundtrip(self, tmp_path):
        p = sample_path(NoiseModel(0.04), 1.0, 2**-5, seed=8)
        write_path_csv(p, tmp_path / "path.csv")
        q = read_path_csv(tmp_path / "path.csv")
        assert q.dt == p.dt
        assert np.array_equal(q.increments, p.increments)
        assert np.array_equal(q.cumulative, p.cumulative)
        header = (tmp_path / "path.csv").read_text().splitlines()[0]
        assert header == "n,t,dB,B"
