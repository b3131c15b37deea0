"""Output covariance matrices of the three entanglement distribution schemes.

Direct transmission: station A keeps one half of a squeezed pair and bounces
the other off the satellite (uplink AS, downlink SB).  Satellite source: the
pair is produced on the satellite and both halves travel downlinks (SA, SB).
Swapping: both stations uplink one half each (AS, BS) and the satellite
performs a continuous-variable Bell measurement, broadcasting the outcomes so
the stations can apply gain-weighted displacements.

Each scheme has a per-realization CM at fixed transmittances and an ensemble
CM obtained by averaging the per-realization CM elements over the fading
statistics.  The ensemble state itself is a non-Gaussian mixture; only its
second moments (and hence its Gaussian entanglement) are tracked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .fading import FadingChannel, LinkGeometry, expand_links, transmittance_nodes
from .gaussian import Squeezing, StandardFormCM, TwoModeCM
from .numerics import DEFAULT_QUAD, QuadratureSpec

KINDS = ("direct", "satellite", "swap")

# Cap on 2D tensor chunk size, in elements, when averaging over two channels.
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class SchemeConfig:
    kind: str
    squeezing: Squeezing
    geometry: LinkGeometry
    beta: float
    w: float
    chi: float = 0.0
    quad: QuadratureSpec = DEFAULT_QUAD

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.chi < 0.0:
            raise DomainError(f"chi must be >= 0, got {self.chi}")

    def links(self) -> tuple[FadingChannel, FadingChannel]:
        """The pair of channels the scheme actually uses, in (A-side, B-side) order."""
        ln = expand_links(self.geometry, self.beta, self.w)
        if self.kind == "direct":
            return ln.a_s, ln.s_b
        if self.kind == "satellite":
            return ln.s_a, ln.s_b
        return ln.a_s, ln.b_s


def _check_transmittance(name: str, eta: float) -> None:
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {eta}")


def _standard_cm(a: float, b: float, c: float) -> TwoModeCM:
    return StandardFormCM(a=a, b=b, c_plus=c, c_minus=-c).to_cm()


def _pair_sums(ch_a: FadingChannel, ch_b: FadingChannel, quad: QuadratureSpec, fns):
    """Weighted sums of fns(eta, eta') over the product of two channel rules.

    Evaluates sum_ij w_i w'_j f(eta_i, eta'_j) for every f in fns, chunking the
    outer axis so wide high-loss rules do not materialize huge tensors.
    """
    eta_a, w_a = transmittance_nodes(ch_a, quad)
    eta_b, w_b = transmittance_nodes(ch_b, quad)
    totals = [0.0] * len(fns)
    step = max(1, _CHUNK_ELEMENTS // eta_b.size)
    for start in range(0, eta_a.size, step):
        ea = eta_a[start:start + step, None]
        wa = w_a[start:start + step, None]
        wgt = wa * w_b[None, :]
        eb = eta_b[None, :]
        for k, f in enumerate(fns):
            totals[k] += float((wgt * f(ea, eb)).sum())
    return totals


def direct_realization(sq: Squeezing, eta: float, eta_prime: float, chi: float = 0.0) -> TwoModeCM:
    """CM after one mode of a squeezed pair crosses both links with given transmittances."""
    _check_transmittance("eta", eta)
    _check_transmittance("eta_prime", eta_prime)
    v = sq.v
    zeta = eta * eta_prime
    return _standard_cm(
        a=v,
        b=1.0 + zeta * (v - 1.0) + chi,
        c=math.sqrt(zeta) * math.sqrt(v * v - 1.0),
    )


def direct_ensemble(cfg: SchemeConfig) -> TwoModeCM:
    """Ensemble CM of direct transmission, averaged over both fading links."""
    if cfg.kind != "direct":
        raise DomainError(f"expected a direct config, got kind={cfg.kind!r}")
    ch_up, ch_down = cfg.links()
    v = cfg.squeezing.v
    b_avg, c_avg = _pair_sums(ch_up, ch_down, cfg.quad, (
        lambda e, ep: 1.0 + e * ep * (v - 1.0),
        lambda e, ep: np.sqrt(e * ep),
    ))
    return _standard_cm(a=v, b=b_avg + cfg.chi, c=c_avg * math.sqrt(v * v - 1.0))


def satellite_ensemble(cfg: SchemeConfig) -> TwoModeCM:
    """Ensemble CM when the squeezed source sits on the satellite."""
    if cfg.kind != "satellite":
        raise DomainError(f"expected a satellite config, got kind={cfg.kind!r}")
    ch_a, ch_b = cfg.links()
    v = cfg.squeezing.v
    eta_a, w_a = transmittance_nodes(ch_a, cfg.quad)
    eta_b, w_b = transmittance_nodes(ch_b, cfg.quad)
    a_avg = 1.0 + float(w_a @ eta_a) * (v - 1.0)
    b_avg = 1.0 + float(w_b @ eta_b) * (v - 1.0)
    # The links are independent, so the cross term factorizes exactly.
    c_avg = float(w_a @ np.sqrt(eta_a)) * float(w_b @ np.sqrt(eta_b)) * math.sqrt(v * v - 1.0)
    return _standard_cm(a=a_avg + cfg.chi, b=b_avg + cfg.chi, c=c_avg)


@dataclass(frozen=True)
class SwapGains:
    """Displacement gains applied by stations A (g1) and B (g4)."""

    g1: float
    g4: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g1) and math.isfinite(self.g4)):
            raise DomainError(f"gains must be finite, got ({self.g1}, {self.g4})")


@dataclass(frozen=True)
class GeneralBipartiteInput:
    """Two zero-mean two-mode states entering the Bell measurement.

    State one covers modes (1, 2) with blocks a*I, b*I and cross diag(c+, c-);
    state two covers modes (3, 4) with blocks d*I, e*I and cross diag(f+, f-).
    Modes 2 and 3 are the ones measured.
    """

    a: float
    b: float
    c_plus: float
    c_minus: float
    d: float
    e: float
    f_plus: float
    f_minus: float

    def __post_init__(self) -> None:
        # Physicality of each constituent state is enforced by embedding.
        StandardFormCM(a=self.a, b=self.b, c_plus=self.c_plus, c_minus=self.c_minus)
        StandardFormCM(a=self.d, b=self.e, c_plus=self.f_plus, c_minus=self.f_minus)


def swap_conditional(inp: GeneralBipartiteInput) -> TwoModeCM:
    """CM of modes (1, 4) after a Bell measurement of modes (2, 3).

    The balanced beam splitter maps the measured pair to difference and sum
    ports; homodyning q on one and p on the other conditions the kept modes.
    """
    s = inp.b + inp.d
    if s <= 1e-12:
        raise NumericalError(f"measured-mode variance sum {s} is not positive")
    m = np.zeros((4, 4))
    m[0, 0] = inp.a - inp.c_plus**2 / s
    m[1, 1] = inp.a - inp.c_minus**2 / s
    m[2, 2] = inp.e - inp.f_plus**2 / s
    m[3, 3] = inp.e - inp.f_minus**2 / s
    m[0, 2] = m[2, 0] = inp.c_plus * inp.f_plus / s
    m[1, 3] = m[3, 1] = -inp.c_minus * inp.f_minus / s
    return TwoModeCM(m)


def swap_ensemble_cm(inp: GeneralBipartiteInput, gains: SwapGains) -> TwoModeCM:
    """CM of the displaced state averaged over Bell outcomes, for arbitrary gains."""
    s = inp.b + inp.d
    g1, g4 = gains.g1, gains.g4
    m = np.zeros((4, 4))
    m[0, 0] = inp.a + s * g1**2 - 2.0 * inp.c_plus * g1
    m[1, 1] = inp.a + s * g1**2 + 2.0 * inp.c_minus * g1
    m[2, 2] = inp.e + s * g4**2 - 2.0 * inp.f_plus * g4
    m[3, 3] = inp.e + s * g4**2 + 2.0 * inp.f_minus * g4
    m[0, 2] = m[2, 0] = inp.c_plus * g4 + inp.f_plus * g1 - g1 * g4 * s
    m[1, 3] = m[3, 1] = inp.c_minus * g4 + inp.f_minus * g1 + g1 * g4 * s
    return TwoModeCM(m)


def general_optimal_gains(inp: GeneralBipartiteInput) -> SwapGains:
    """Gains that zero the residual conditional means of the kept modes.

    A single gain per mode can cancel both quadrature residuals only for
    phase-symmetric cross blocks (c+ = -c-, f+ = -f-).
    """
    tol = 1e-9 * max(1.0, abs(inp.c_plus), abs(inp.f_plus))
    if abs(inp.c_plus + inp.c_minus) > tol or abs(inp.f_plus + inp.f_minus) > tol:
        raise DomainError("optimal phase-independent gains need c+ = -c- and f+ = -f-")
    s = inp.b + inp.d
    return SwapGains(g1=inp.c_plus / s, g4=inp.f_plus / s)


def optimal_gains(eta: float, eta_prime: float, sq: Squeezing) -> SwapGains:
    """Optimal displacement gains for squeezed-pair inputs after lossy uplinks."""
    _check_transmittance("eta", eta)
    _check_transmittance("eta_prime", eta_prime)
    v = sq.v
    den = 2.0 + (eta + eta_prime) * (v - 1.0)
    root = math.sqrt(v * v - 1.0)
    return SwapGains(g1=math.sqrt(eta) * root / den, g4=math.sqrt(eta_prime) * root / den)


def swap_inputs(sq: Squeezing, eta: float, eta_prime: float, chi: float = 0.0) -> GeneralBipartiteInput:
    """The two uplink-attenuated squeezed pairs arriving at the Bell measurement.

    Excess noise chi sits on each transmitted mode (mode 2 of the first pair,
    mode 3 of the second).
    """
    _check_transmittance("eta", eta)
    _check_transmittance("eta_prime", eta_prime)
    v = sq.v
    root = math.sqrt(v * v - 1.0)
    c = math.sqrt(eta) * root
    f = math.sqrt(eta_prime) * root
    return GeneralBipartiteInput(
        a=v, b=1.0 + eta * (v - 1.0) + chi, c_plus=c, c_minus=-c,
        d=1.0 + eta_prime * (v - 1.0) + chi, e=v, f_plus=f, f_minus=-f,
    )


def swap_realization(sq: Squeezing, eta: float, eta_prime: float, chi: float = 0.0) -> TwoModeCM:
    """Swapped CM at fixed uplink transmittances, with optimally chosen gains."""
    inp = swap_inputs(sq, eta, eta_prime, chi)
    return swap_ensemble_cm(inp, general_optimal_gains(inp))


def swap_ensemble(cfg: SchemeConfig) -> TwoModeCM:
    """Ensemble CM of the swapping scheme, averaged over both uplinks."""
    if cfg.kind != "swap":
        raise DomainError(f"expected a swap config, got kind={cfg.kind!r}")
    ch_a, ch_b = cfg.links()
    v = cfg.squeezing.v
    v2m1 = v * v - 1.0
    chi2 = 2.0 * cfg.chi

    def shared(e, ep):
        return v2m1 / (2.0 + (e + ep) * (v - 1.0) + chi2)

    a_avg, b_avg, c_avg = _pair_sums(ch_a, ch_b, cfg.quad, (
        lambda e, ep: v - e * shared(e, ep),
        lambda e, ep: v - ep * shared(e, ep),
        lambda e, ep: np.sqrt(e * ep) * shared(e, ep),
    ))
    return _standard_cm(a=a_avg, b=b_avg, c=c_avg)


def ensemble_cm(cfg: SchemeConfig) -> TwoModeCM:
    """Ensemble CM for any scheme kind."""
    if cfg.kind == "direct":
        return direct_ensemble(cfg)
    if cfg.kind == "satellite":
        return satellite_ensemble(cfg)
    return swap_ensemble(cfg)
