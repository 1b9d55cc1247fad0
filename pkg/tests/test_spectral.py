import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import direct_dft, direct_idft, integral
from stochbbm.errors import ConfigError, NumericError
from stochbbm.spectral import (Grid, MultiplierSymbol, SpectralField, apply_multiplier,
                               bessel_inv_sqrt_symbol, bessel_symbol, dealias,
                               dealiased_product, derivative_symbol, dispersive_group_symbol,
                               energy_norm, inner, integrate_product, sobolev_norm,
                               to_physical, to_spectral, translation_symbol)

TWO_PI = 2 * np.pi


def field_of(grid, f):
    return to_spectral(grid, f(grid.x))


def random_field(grid, rng, band=None):
    band = band or (grid.size - 1) // 3
    c = np.zeros(grid.size, dtype=complex)
    z = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    c[1:band + 1] = z / (1 + np.arange(1, band + 1))
    c[-band:] = np.conj(c[1:band + 1])[::-1]
    c[0] = rng.standard_normal()
    return SpectralField(grid, c)


class TestGrid:
    def test_frequencies(self):
        g = Grid(TWO_PI, 16)
        assert np.all(np.diff(g.frequencies) > 0)
        assert g.frequencies[0] == -8 and g.frequencies[-1] == 7
        assert np.allclose(g.frequencies[1:], -g.frequencies[1:][::-1])
        assert g.nyquist == pytest.approx(8.0)

    @pytest.mark.parametrize("L,N", [(0.0, 16), (-1.0, 16), (TWO_PI, 7), (TWO_PI, 6),
                                     (TWO_PI, 15), (math.inf, 16)])
    def test_invalid(self, L, N):
        with pytest.raises(ConfigError):
            Grid(L, N)

    def test_hashable_and_equal(self):
        assert Grid(TWO_PI, 16) == Grid(TWO_PI, 16)
        assert len({Grid(TWO_PI, 16), Grid(TWO_PI, 16)}) == 1

    def test_dealias_band(self):
        g = Grid(TWO_PI, 24)
        kept = np.sort(g.k[g.dealias_mask])
        assert kept.max() == 7 and kept.min() == -7


class TestTransforms:
    def test_zero(self):
        g = Grid(TWO_PI, 16)
        u = to_spectral(g, np.zeros(16))
        assert np.all(u.coeffs == 0)
        assert np.all(to_physical(u) == 0)

    def test_cos_coefficients_match_direct_sum(self):
        g = Grid(TWO_PI, 16)
        u = np.cos(g.x)
        c = to_spectral(g, u).coeffs
        assert np.allclose(c, direct_dft(u), atol=1e-14)
        expected = np.zeros(16)
        expected[1] = expected[-1] = 0.5
        assert np.allclose(c, expected, atol=1e-15)

    def test_inverse_matches_direct_sum(self):
        g = Grid(3.0, 32)
        u = random_field(g, np.random.default_rng(1), band=15)
        assert np.allclose(to_physical(u), direct_idft(u.coeffs), atol=1e-13)

    def test_hermitian_output(self):
        g = Grid(5.0, 32)
        c = to_spectral(g, np.random.default_rng(0).standard_normal(32)).coeffs
        assert np.array_equal(c[-g.k], np.conj(c))

    def test_size_mismatch(self):
        with pytest.raises(ConfigError):
            to_spectral(Grid(TWO_PI, 16), np.zeros(8))
        with pytest.raises(ConfigError):
            SpectralField(Grid(TWO_PI, 16), np.zeros(8))

    def test_complex_input_rejected(self):
        with pytest.raises(ConfigError):
            to_spectral(Grid(TWO_PI, 16), np.zeros(16, complex))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 8), st.floats(0.1, 500.0), st.integers(0, 2**32 - 1))
    def test_roundtrip(self, logn, L, seed):
        g = Grid(L, 2**logn)
        u = np.random.default_rng(seed).standard_normal(g.size)
        back = to_physical(to_spectral(g, u))
        assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 8), st.floats(0.1, 500.0), st.integers(0, 2**32 - 1))
    def test_parseval(self, logn, L, seed):
        g = Grid(L, 2**logn)
        u = np.random.default_rng(seed).standard_normal(g.size)
        trapezoid = L / g.size * np.sum(u**2)
        assert sobolev_norm(to_spectral(g, u), 0.0) ** 2 == pytest.approx(trapezoid, rel=1e-10)


class TestMultipliers:
    def test_K_on_constant(self):
        g = Grid(TWO_PI, 16)
        u = field_of(g, lambda x: 3.0 + 0 * x)
        assert np.allclose(to_physical(apply_multiplier(u, bessel_symbol(1.0))), 3.0)

    def test_K_on_cos2x(self):
        g = Grid(TWO_PI, 16)
        u = field_of(g, lambda x: np.cos(2 * x))
        out = to_physical(apply_multiplier(u, bessel_symbol(1.0)))
        assert np.allclose(out, 0.2 * np.cos(2 * g.x), atol=1e-14)

    def test_translation_by_pi(self):
        g = Grid(TWO_PI, 16)
        u = field_of(g, np.cos)
        out = to_physical(apply_multiplier(u, translation_symbol(np.pi)))
        assert np.allclose(out, -np.cos(g.x), atol=1e-14)

    def test_derivative(self):
        g = Grid(TWO_PI, 32)
        u = field_of(g, lambda x: np.sin(3 * x))
        assert np.allclose(to_physical(apply_multiplier(u, derivative_symbol(1))),
                           3 * np.cos(3 * g.x), atol=1e-13)
        assert np.allclose(to_physical(apply_multiplier(u, derivative_symbol(2))),
                           -9 * np.sin(3 * g.x), atol=1e-12)

    def test_K_symbol_shape(self):
        xi = np.linspace(-50, 50, 1001)
        for s0 in (0.6, 1.0, 2.5):
            k = bessel_symbol(s0)(xi).real
            assert np.all(k > 0) and np.all(k <= 1)
            assert np.allclose(k, k[::-1])
            assert np.allclose(k * (1 + xi**2) ** s0, 1.0)

    @pytest.mark.parametrize("sym", [translation_symbol(0.37), translation_symbol(-12.0),
                                     dispersive_group_symbol(1.0, 0.3),
                                     dispersive_group_symbol(0.75, 7.0)])
    def test_phase_symbols_unimodular(self, sym):
        vals = sym.on(Grid(17.0, 64))
        assert np.allclose(np.abs(vals), 1.0, atol=1e-15)

    def test_nonfinite_symbol(self):
        bad = MultiplierSymbol("bad", lambda xi: 1.0 / xi)
        u = field_of(Grid(TWO_PI, 16), np.cos)
        with np.errstate(divide="ignore"), pytest.raises(NumericError):
            apply_multiplier(u, bad)

    def test_nyquist_stays_real(self):
        g = Grid(TWO_PI, 16)
        u = to_spectral(g, np.random.default_rng(3).standard_normal(16))
        out = apply_multiplier(u, derivative_symbol(1))
        assert np.allclose(to_physical(out) + 0j, np.fft.ifft(out.coeffs * 16), atol=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-100, 100), st.floats(0, 50), st.floats(0, 3), st.integers(0, 2**31))
    def test_phase_isometry(self, beta, t, sigma, seed):
        g = Grid(20.0, 64)
        u = random_field(g, np.random.default_rng(seed))
        n0 = sobolev_norm(u, sigma)
        for sym in (translation_symbol(beta), dispersive_group_symbol(1.0, t)):
            assert sobolev_norm(apply_multiplier(u, sym), sigma) == pytest.approx(n0, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.6, 3), st.floats(-5, 5), st.integers(0, 2**31))
    def test_commutativity(self, s0, beta, seed):
        g = Grid(9.0, 32)
        u = random_field(g, np.random.default_rng(seed))
        m1, m2 = bessel_symbol(s0), translation_symbol(beta)
        a = apply_multiplier(apply_multiplier(u, m1), m2)
        b = apply_multiplier(apply_multiplier(u, m2), m1)
        # floating-point products commute only up to rounding
        assert np.allclose(a.coeffs, b.coeffs, rtol=4e-16, atol=0)

    def test_inverse_sqrt_consistent_with_energy(self):
        g = Grid(11.0, 64)
        u = random_field(g, np.random.default_rng(5))
        v = apply_multiplier(u, bessel_inv_sqrt_symbol(1.3))
        assert energy_norm(u, 1.3) ** 2 == pytest.approx(0.5 * sobolev_norm(v, 0) ** 2, rel=1e-13)


class TestNorms:
    def test_zero(self):
        z = SpectralField.zeros(Grid(TWO_PI, 16))
        assert sobolev_norm(z, 1.0) == 0.0 and energy_norm(z, 1.0) == 0.0

    @pytest.mark.parametrize("sigma,expected", [(0.0, math.sqrt(math.pi)),
                                                (1.0, math.sqrt(2 * math.pi))])
    def test_cos(self, sigma, expected):
        u = field_of(Grid(TWO_PI, 16), np.cos)
        assert sobolev_norm(u, sigma) == pytest.approx(expected, rel=1e-14)
        assert sobolev_norm(u, 0.0) ** 2 == pytest.approx(integral(lambda x: np.cos(x) ** 2))

    @pytest.mark.parametrize("a", [0.1, 1.0, 3.0])
    def test_energy_norm_cos(self, a):
        # 1/2 int (K^{-1/2} a cos x)^2 = 1/2 * 2 * a^2 * pi
        u = field_of(Grid(TWO_PI, 16), lambda x: a * np.cos(x))
        assert energy_norm(u, 1.0) ** 2 == pytest.approx(math.pi * a * a, rel=1e-14)
        quad_val = integral(lambda x: 0.5 * (math.sqrt(2) * a * np.cos(x)) ** 2)
        assert energy_norm(u, 1.0) ** 2 == pytest.approx(quad_val, rel=1e-12)

    def test_single_mode_energy(self):
        g = Grid(10.0, 32)
        k = 3
        c = np.zeros(32, complex)
        c[k], c[-k] = 0.4 - 0.2j, 0.4 + 0.2j
        u = SpectralField(g, c)
        xi = 2 * np.pi * k / 10.0
        expected = 0.5 * 10.0 * (1 + xi**2) * abs(c[k]) ** 2 * 2
        assert energy_norm(u, 1.0) ** 2 == pytest.approx(expected, rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.55, 3.0), st.floats(1.0, 200.0), st.integers(0, 2**31))
    def test_norm_equivalence(self, s0, L, seed):
        g = Grid(L, 64)
        u = random_field(g, np.random.default_rng(seed))
        w = bessel_symbol(s0)(g.xi).real * (1 + g.xi**2) ** s0
        c1, c2 = np.sqrt(w.min()), np.sqrt(w.max())
        hs, en = sobolev_norm(u, s0), energy_norm(u, s0) * math.sqrt(2)
        assert c1 * hs <= en * (1 + 1e-12) and en <= c2 * hs * (1 + 1e-12)
        assert en == pytest.approx(hs, rel=1e-12)

    def test_inner(self):
        g = Grid(TWO_PI, 16)
        u, v = field_of(g, np.cos), field_of(g, lambda x: np.cos(x) + np.sin(2 * x))
        assert inner(u, v) == pytest.approx(math.pi)


class TestProducts:
    def test_cos_squared(self):
        g = Grid(TWO_PI, 16)
        u = field_of(g, np.cos)
        p = dealiased_product(u, u)
        assert np.allclose(to_physical(p), 0.5 + 0.5 * np.cos(2 * g.x), atol=1e-15)

    def test_zero(self):
        g = Grid(TWO_PI, 16)
        u = field_of(g, np.cos)
        assert np.all(dealiased_product(u, SpectralField.zeros(g)).coeffs == 0)

    @pytest.mark.parametrize("N", [8, 16, 24, 64])
    def test_aliased_mode_removed(self, N):
        g = Grid(TWO_PI, N)
        m = N // 3 + 1
        u = field_of(g, lambda x: np.cos(m * x))
        p = dealiased_product(u, u)
        assert np.all(p.coeffs[np.abs(g.k) > N // 3] == 0)
        assert np.allclose(p.coeffs, 0)

    def test_band_limited_exact(self):
        g = Grid(TWO_PI, 48)
        u = field_of(g, lambda x: np.cos(3 * x) + np.sin(5 * x))
        v = field_of(g, lambda x: np.sin(4 * x) - 2.0)
        exact = (np.cos(3 * g.x) + np.sin(5 * g.x)) * (np.sin(4 * g.x) - 2.0)
        assert np.allclose(to_physical(dealiased_product(u, v)), exact, atol=1e-13)

    def test_grid_mismatch(self):
        u = field_of(Grid(TWO_PI, 16), np.cos)
        v = field_of(Grid(TWO_PI, 32), np.cos)
        with pytest.raises(ConfigError):
            dealiased_product(u, v)
        with pytest.raises(ConfigError):
            u + v

    def test_dealias_idempotent(self):
        g = Grid(3.0, 32)
        u = to_spectral(g, np.random.default_rng(2).standard_normal(32))
        once = dealias(u)
        assert np.array_equal(dealias(once).coeffs, once.coeffs)

    @pytest.mark.parametrize("factors", [
        (np.cos, np.cos, np.cos),
        ((lambda x: 1 + np.cos(x) + 0.5 * np.sin(3 * x)),) * 3,
        (lambda x: np.cos(7 * x), lambda x: np.cos(7 * x), np.cos),
    ])
    def test_cubic_integral(self, factors):
        # triple products of interpolants integrate exactly on the 3/2-padded grid
        g = Grid(TWO_PI, 16)
        fields = [field_of(g, f) for f in factors]
        exact = integral(lambda x: factors[0](x) * factors[1](x) * factors[2](x))
        assert integrate_product(*fields) == pytest.approx(exact, abs=1e-12)

    def test_nyquist_mode_split(self):
        # the unpaired mode is interpolated by cos(N x / 2), not by a complex exponential
        g = Grid(TWO_PI, 16)
        u = field_of(g, lambda x: np.cos(8 * x) + 1.0)
        assert integrate_product(u, u) == pytest.approx(3 * np.pi, rel=1e-14)

    def test_unitary_symbol_identity_on_nyquist(self):
        g = Grid(TWO_PI, 16)
        vals = translation_symbol(0.3).on(g)
        assert vals[g.nyquist_index] == 1.0
        u = to_spectral(g, np.random.default_rng(4).standard_normal(16))
        out = apply_multiplier(u, translation_symbol(0.3))
        assert sobolev_norm(out, 2.0) == pytest.approx(sobolev_norm(u, 2.0), rel=1e-14)
