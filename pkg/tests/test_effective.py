"""Effective-channel reduction tests.

The reduction is checked by reconstructing the input state, the swap
per-realization identities by a second route through the reduction itself,
and the principal-value fading average against scipy's Cauchy-weight rule.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from cvsat.effective import (
    EffectiveParams,
    _cosh_swapped,
    _swap_cosh_average,
    _swap_eta_integrals,
    ordering_check,
    scheme_effective_summary,
    to_effective,
    try_effective,
)
from cvsat.errors import DomainError, NumericalError
from cvsat.fading import (
    D_MAX_SIGMAS,
    LinkGeometry,
    derive_params,
    deflection_of_eta,
    eta_of_deflection,
    rayleigh_pdf,
    sample,
)
from cvsat.gaussian import Squeezing, StandardFormCM, apply_loss, log_negativity, tmsv_cm
from cvsat.schemes import SchemeConfig, swap_realization

from oracles import dense_channel_average

GEOM = LinkGeometry(sigma_b=0.7, k1=0.5, k2=0.64)


def config(kind, r=1.0, geom=GEOM, beta=1.0, w=1.0):
    return SchemeConfig(kind=kind, squeezing=Squeezing(r), geometry=geom, beta=beta, w=w)


class TestToEffective:
    @pytest.mark.parametrize("r,eta_a,eta_b", [
        (0.3, 1.0, 1.0),
        (1.0, 0.8, 0.55),
        (1.5, 1.0, 0.05),
        (2.0, 0.02, 0.9),
        (0.1, 0.6, 0.6),
    ])
    def test_recovers_loss_parameters(self, r, eta_a, eta_b):
        cm = apply_loss(tmsv_cm(Squeezing(r)), eta_a, eta_b)
        eff = to_effective(cm)
        assert eff.r_e == pytest.approx(r, abs=1e-10)
        assert eff.eta_a == pytest.approx(eta_a, abs=1e-10)
        assert eff.eta_b == pytest.approx(eta_b, abs=1e-10)

    @pytest.mark.parametrize("r,eta_a,eta_b", [(1.0, 0.8, 0.55), (1.5, 1.0, 0.05)])
    def test_round_trip_reconstructs_cm(self, r, eta_a, eta_b):
        cm = apply_loss(tmsv_cm(Squeezing(r)), eta_a, eta_b)
        eff = to_effective(cm)
        back = apply_loss(tmsv_cm(Squeezing(eff.r_e)), eff.eta_a, eff.eta_b)
        np.testing.assert_allclose(back.m, cm.m, atol=1e-9)

    def test_noisy_state_still_reduces(self):
        # excess noise keeps the CM in the aI/bI/diag(c,-c) family; as long
        # as it stays entangled the reduction reconstructs it exactly
        sf = StandardFormCM(a=2.5, b=1.9, c_plus=1.7, c_minus=-1.7)
        eff = to_effective(sf)
        back = apply_loss(tmsv_cm(Squeezing(eff.r_e)), eff.eta_a, eff.eta_b)
        np.testing.assert_allclose(back.m, sf.to_cm().m, atol=1e-9)

    def test_separable_state_rejected(self):
        sf = StandardFormCM(a=2.0, b=2.0, c_plus=0.9, c_minus=-0.9)
        assert log_negativity(sf) == 0.0
        with pytest.raises(DomainError):
            to_effective(sf)
        assert try_effective(sf) is None

    def test_phase_asymmetric_rejected(self):
        sf = StandardFormCM(a=2.0, b=2.0, c_plus=1.3, c_minus=-0.9)
        with pytest.raises(DomainError):
            to_effective(sf)

    def test_vacuum_rejected(self):
        with pytest.raises(DomainError):
            to_effective(StandardFormCM(a=1.0, b=1.0, c_plus=0.0, c_minus=0.0))

    def test_accepts_standard_form_and_full_cm(self):
        cm = apply_loss(tmsv_cm(Squeezing(0.9)), 0.7, 0.6)
        a = to_effective(cm)
        b = to_effective(
            StandardFormCM(a=cm.m[0, 0], b=cm.m[2, 2], c_plus=cm.m[0, 2], c_minus=cm.m[1, 3])
        )
        assert a == b


class TestSwapRealizationReduction:
    @pytest.mark.parametrize("eta,eta_prime", [
        (1.0, 1.0), (0.9, 0.7), (0.6, 0.6), (0.95, 0.1), (0.52, 0.49),
    ])
    def test_dual_route_identities(self, eta, eta_prime):
        # route one: reduce the actual swapped CM; route two: the closed
        # forms used by the fading averages
        v = Squeezing(1.2).v
        eff = to_effective(swap_realization(Squeezing(1.2), eta, eta_prime))
        assert math.cosh(2.0 * eff.r_e) == pytest.approx(
            float(_cosh_swapped(eta, eta_prime, v)), rel=1e-10
        )
        s = eta + eta_prime - 1.0
        eta_a_closed = -s * (v - 1.0) / (eta * (1.0 - v) + 2.0 * (eta_prime - 1.0))
        eta_b_closed = -s * (v - 1.0) / (eta_prime * (1.0 - v) + 2.0 * (eta - 1.0))
        assert eff.eta_a == pytest.approx(eta_a_closed, rel=1e-10)
        assert eff.eta_b == pytest.approx(eta_b_closed, rel=1e-10)

    def test_lossless_swap_values(self):
        v = Squeezing(1.0).v
        assert float(_cosh_swapped(1.0, 1.0, v)) == pytest.approx(
            (v * v + 1.0) / (2.0 * v), rel=1e-14
        )
        eff = to_effective(swap_realization(Squeezing(1.0), 1.0, 1.0))
        assert eff.eta_a == pytest.approx(1.0, abs=1e-10)
        assert eff.eta_b == pytest.approx(1.0, abs=1e-10)
        assert math.cosh(2.0 * eff.r_e) == pytest.approx((v * v + 1.0) / (2.0 * v), rel=1e-12)

    def test_boundary_states_are_separable(self):
        # on and below eta + eta' = 1 the swapped state has no reduction
        for eta, eta_prime in ((0.5, 0.5), (0.3, 0.6), (0.2, 0.2)):
            cm = swap_realization(Squeezing(1.0), eta, eta_prime)
            assert log_negativity(cm) == 0.0
            assert try_effective(cm) is None


class TestSchemeEffectiveSummary:
    def test_direct(self):
        cfg = config("direct", r=0.9, beta=0.5)
        up, down = cfg.links()
        eff = scheme_effective_summary(cfg)
        assert eff.r_e == 0.9
        assert eff.eta_a == 1.0
        want = dense_channel_average(up, lambda e: e) * dense_channel_average(down, lambda e: e)
        assert eff.eta_b == pytest.approx(want, abs=1e-9)

    def test_satellite(self):
        cfg = config("satellite", r=0.9, beta=0.5)
        ch_a, ch_b = cfg.links()
        eff = scheme_effective_summary(cfg)
        assert eff.r_e == 0.9
        assert eff.eta_a == pytest.approx(dense_channel_average(ch_a, lambda e: e), abs=1e-9)
        assert eff.eta_b == pytest.approx(dense_channel_average(ch_b, lambda e: e), abs=1e-9)

    def test_swap_point_mass_equals_realization_reduction(self):
        cfg = config("swap", geom=LinkGeometry(sigma_b=0.0, k1=0.5, k2=0.64), beta=1.0)
        ch_a, ch_b = cfg.links()
        eff = scheme_effective_summary(cfg)
        want = to_effective(swap_realization(cfg.squeezing, ch_a.eta0, ch_b.eta0))
        assert eff.eta_a == pytest.approx(want.eta_a, rel=1e-10)
        assert eff.eta_b == pytest.approx(want.eta_b, rel=1e-10)
        assert eff.r_e == pytest.approx(want.r_e, rel=1e-10)

    def test_swap_eta_average_against_monte_carlo(self):
        cfg = config("swap", r=1.0)
        ch_a, ch_b = cfg.links()
        v = cfg.squeezing.v
        etas = _swap_eta_integrals(ch_a, ch_b, v, cfg.quad)
        rng = np.random.default_rng(77)
        n = 400_000
        e = sample(ch_a, rng, n)
        ep = sample(ch_b, rng, n)
        signed = -(e + ep - 1.0) * (v - 1.0) / (e * (1.0 - v) + 2.0 * (ep - 1.0))
        for got, draws in ((etas.eta_a, np.maximum(signed, 0.0)),
                           (etas.signed_eta_a, signed)):
            err = draws.std(ddof=1) / math.sqrt(n)
            assert abs(got - draws.mean()) < 4.0 * err + 1e-4
        sep_draws = (e + ep < 1.0).astype(float)
        err_s = sep_draws.std(ddof=1) / math.sqrt(n)
        # indicator integrand: the tensor rule resolves it only to the panel
        # scale, so allow a small systematic term on top of the MC error
        assert abs(etas.separable_mass - sep_draws.mean()) < 4.0 * err_s + 2e-3
        assert 0.0 <= etas.separable_mass <= 1.0
        assert 0.0 <= etas.eta_a <= 1.0
        assert etas.signed_eta_a <= etas.eta_a


class TestSwapCoshAverage:
    def test_point_mass_pair_plain_average(self):
        ch_a = derive_params(0.0, 1.0, 1.0)
        ch_b = derive_params(0.0, 1.0, 1.0)
        v = Squeezing(1.0).v
        got, pv_used = _swap_cosh_average(ch_a, ch_b, v, config("swap").quad)
        assert not pv_used
        assert got == pytest.approx(float(_cosh_swapped(ch_a.eta0, ch_b.eta0, v)), rel=1e-12)

    def test_point_mass_on_boundary_raises(self):
        ch_a = derive_params(0.0, 0.4, 1.0)
        # choose beta so that eta0_b = 1 - eta0_a to float rounding
        target = 1.0 - ch_a.eta0
        beta_b = math.sqrt(-0.5 * math.log(1.0 - target * target))
        ch_b = derive_params(0.0, beta_b, 1.0)
        with pytest.raises(NumericalError):
            _swap_cosh_average(ch_a, ch_b, Squeezing(1.0).v, config("swap").quad)

    def test_principal_value_against_scipy_cauchy(self):
        # point-mass A side inside the pole window reduces the average to a
        # single principal-value integral scipy can check directly
        ch_a = derive_params(0.0, 1.0, 1.0)
        ch_b = derive_params(0.7, 1.0, 1.0)
        v = Squeezing(1.0).v
        e = ch_a.eta0
        assert 1.0 - ch_b.eta0 < e < 1.0
        got, pv_used = _swap_cosh_average(ch_a, ch_b, v, config("swap").quad)
        assert pv_used

        d_hi = D_MAX_SIGMAS * ch_b.sigma_b
        d0 = float(deflection_of_eta(ch_b, 1.0 - e))

        def smooth(d):
            etab = float(eta_of_deflection(ch_b, d))
            num = (e * e + etab * etab) * (1.0 - v) + e * etab * (v * v + 3.0) \
                + (e + etab) * (v - 3.0) + 2.0
            return float(rayleigh_pdf(d, ch_b.sigma_b)) * num / ((e + etab) * (v - 1.0) + 2.0)

        def regular(d):
            s = e + float(eta_of_deflection(ch_b, d)) - 1.0
            if abs(d - d0) < 1e-9:
                # remove the 0/0 at the crossing with the analytic slope
                slope = -(1.0 - e) * 0.5 * ch_b.lambda_shape \
                    * d0 ** (ch_b.lambda_shape - 1.0) / ch_b.l_scale**ch_b.lambda_shape
                return smooth(d) / slope
            return smooth(d) * (d - d0) / s

        want, err = integrate.quad(regular, 0.0, d_hi, weight="cauchy", wvar=d0, limit=400)
        assert err < 1e-7
        assert got == pytest.approx(want, abs=1e-8)

    def test_all_mass_on_entangled_side_needs_no_pv(self):
        # with eta0 pairs summing below 1 the whole support is separable side;
        # with tight wander around high eta0 it is all entangled side
        ch_a = derive_params(0.05, 1.5, 1.0)
        ch_b = derive_params(0.05, 1.5, 1.0)
        got, pv_used = _swap_cosh_average(ch_a, ch_b, Squeezing(1.0).v, config("swap").quad)
        assert not pv_used
        assert got > 1.0


class TestOrderingCheck:
    def test_reference_geometry(self):
        report = ordering_check(GEOM, Squeezing(1.0), beta=1.0, w=1.0)
        assert report["swap_le_direct"]
        assert report["satellite_ge_direct"]
        for kind in ("direct", "satellite", "swap"):
            entry = report[kind]
            assert entry["eta_product"] == pytest.approx(entry["eta_a"] * entry["eta_b"])
            assert 0.0 <= entry["eta_product"] <= 1.0
        assert 0.0 <= report["swap_separable_mass"] <= 1.0
        assert isinstance(report["swap_pv_used"], bool)
        assert report["swap_signed_eta_a"] <= report["swap"]["eta_a"]
        assert report["swap_signed_eta_b"] <= report["swap"]["eta_b"]

    def test_swap_never_beats_direct_across_geometries(self):
        for sigma, beta in ((0.32, 0.5), (0.7, 1.0), (1.0, 0.5), (1.5, 0.4), (2.0, 0.5)):
            geom = LinkGeometry(sigma_b=sigma, k1=0.5, k2=0.64)
            report = ordering_check(geom, Squeezing(1.5), beta=beta, w=1.0,
                                    include_swap_squeezing=False)
            assert report["swap_le_direct"]
            assert report["swap"]["eta_product"] <= report["direct"]["eta_product"] + 1e-12
            assert 0.0 <= report["swap"]["eta_a"] <= 1.0
            assert 0.0 <= report["swap"]["eta_b"] <= 1.0

    def test_skipping_swap_squeezing(self):
        report = ordering_check(GEOM, Squeezing(1.0), beta=1.0, w=1.0,
                                include_swap_squeezing=False)
        assert math.isnan(report["swap"]["r_e"])
        assert report["swap_cosh_avg"] is None
        assert report["swap_pv_used"] is False

    def test_point_mass_geometry(self):
        geom = LinkGeometry(sigma_b=0.0, k1=0.5, k2=0.64)
        report = ordering_check(geom, Squeezing(1.0), beta=1.0, w=1.0)
        eta0 = derive_params(0.0, 1.0, 1.0).eta0
        assert report["direct"]["eta_product"] == pytest.approx(eta0 * eta0, rel=1e-12)
        assert report["satellite_ge_direct"]
        assert report["swap_le_direct"]
