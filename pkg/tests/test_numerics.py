import math

import numpy as np
import pytest

from cvsat.errors import DomainError, NumericalError
from cvsat.numerics import (
    DEFAULT_QUAD,
    McSpec,
    QuadratureSpec,
    bessel_i,
    erfc,
    integrate_1d,
    integrate_2d,
    mc_expectation,
    panel_nodes,
)
from oracles import bessel_i0_series, bessel_i1_series


class TestSpecs:
    def test_quadrature_spec_defaults(self):
        assert DEFAULT_QUAD.nodes_1d == 64
        assert DEFAULT_QUAD.subdivisions == 8

    def test_quadrature_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(nodes_1d=4, subdivisions=8)
        with pytest.raises(DomainError):
            QuadratureSpec(nodes_1d=16, subdivisions=0)

    def test_mc_spec_validation(self):
        with pytest.raises(DomainError):
            McSpec(samples=100, seed=1)
        with pytest.raises(DomainError):
            McSpec(samples=10_000, seed=-1)
        with pytest.raises(DomainError):
            McSpec(samples=10_000, seed=2**64)


class TestIntegrate1d:
    def test_polynomial_exactness(self):
        # An n-node Gauss rule is exact through degree 2n-1 on each panel.
        for k in (0, 1, 5, 17):
            got = integrate_1d(lambda x: x**k, 0.0, 2.0, QuadratureSpec(16, 2))
            assert got == pytest.approx(2.0 ** (k + 1) / (k + 1), rel=1e-13)

    def test_exponential(self):
        got = integrate_1d(np.exp, 0.0, 1.0)
        assert got == pytest.approx(math.e - 1.0, rel=1e-14)

    def test_gaussian_over_wide_interval(self):
        got = integrate_1d(lambda x: np.exp(-0.5 * x * x), -20.0, 20.0)
        assert got == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-12)

    def test_degenerate_interval(self):
        assert integrate_1d(np.exp, 1.0, 1.0) == 0.0

    def test_rejects_non_finite_integrand(self):
        with np.errstate(divide="ignore"), pytest.raises(NumericalError):
            integrate_1d(lambda x: 1.0 / (x - x), 0.0, 1.0)

    def test_panel_nodes_cover_interval(self):
        x, w = panel_nodes(2.0, 5.0, QuadratureSpec(8, 3))
        assert x.size == 24
        assert np.all((x > 2.0) & (x < 5.0))
        assert float(w.sum()) == pytest.approx(3.0, rel=1e-14)


class TestIntegrate2d:
    def test_separable_product(self):
        got = integrate_2d(
            lambda x, y: np.exp(x) * np.cos(y), ((0.0, 1.0), (0.0, math.pi / 2.0))
        )
        assert got == pytest.approx((math.e - 1.0) * 1.0, rel=1e-13)

    def test_non_separable(self):
        got = integrate_2d(lambda x, y: 1.0 / (1.0 + x * y), ((0.0, 1.0), (0.0, 1.0)))
        # sum_k (-1)^k/(k+1)^2 = pi^2/12
        assert got == pytest.approx(math.pi**2 / 12.0, rel=1e-10)

    def test_empty_box(self):
        assert integrate_2d(lambda x, y: x + y, ((0.0, 0.0), (0.0, 1.0))) == 0.0


class TestSpecialFunctions:
    def test_erfc_matches_stdlib(self):
        for x in np.linspace(-6.0, 6.0, 49):
            assert erfc(x) == pytest.approx(math.erfc(x), rel=1e-13, abs=1e-300)

    def test_erfc_vectorized(self):
        x = np.array([-1.0, 0.0, 2.5])
        assert np.allclose(erfc(x), [math.erfc(v) for v in x], rtol=1e-13)

    def test_bessel_matches_series(self):
        for x in (0.0, 1e-3, 0.5, 4.0, 16.0, 64.0):
            assert bessel_i(0, x) == pytest.approx(bessel_i0_series(x), rel=1e-13)
            assert bessel_i(1, x) == pytest.approx(bessel_i1_series(x), rel=1e-13)

    def test_bessel_validation(self):
        with pytest.raises(DomainError):
            bessel_i(2, 1.0)
        with pytest.raises(DomainError):
            bessel_i(0, -0.5)


class TestMcExpectation:
    def test_seeded_reproducibility(self):
        spec = McSpec(samples=50_000, seed=99)
        first = mc_expectation(lambda rng, n: rng.uniform(0.0, 1.0, n), lambda x: x * x, spec)
        second = mc_expectation(lambda rng, n: rng.uniform(0.0, 1.0, n), lambda x: x * x, spec)
        assert first == second

    def test_uniform_mean_within_error_bars(self):
        spec = McSpec(samples=200_000, seed=7)
        mean, se = mc_expectation(lambda rng, n: rng.uniform(0.0, 1.0, n), lambda x: x, spec)
        assert abs(mean - 0.5) < 4.0 * se
        assert se == pytest.approx(math.sqrt(1.0 / 12.0 / spec.samples), rel=0.05)

    def test_tuple_sampler(self):
        spec = McSpec(samples=100_000, seed=3)
        mean, se = mc_expectation(
            lambda rng, n: (rng.uniform(0, 1, n), rng.uniform(0, 1, n)),
            lambda x, y: x * y,
            spec,
        )
        assert abs(mean - 0.25) < 4.0 * se

    def test_rejects_non_finite(self):
        spec = McSpec(samples=10_000, seed=1)
        with np.errstate(invalid="ignore"), pytest.raises(NumericalError):
            mc_expectation(lambda rng, n: rng.uniform(0, 1, n), lambda x: np.log(-x), spec)
