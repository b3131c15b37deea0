"""Independent reference implementations used only by the test suite.

Everything here is deliberately written from first principles (power series,
stdlib special functions, dense brute-force quadrature, explicit 8x8 linear
algebra) so that agreement with the package is evidence, not circularity.
Slow and simple beats fast and shared.
"""

from __future__ import annotations

import math

import numpy as np

from cvsat.fading import FadingChannel
from cvsat.gaussian import Squeezing, TwoModeCM, add_excess_noise, apply_loss, tmsv_cm
from cvsat.schemes import GeneralBipartiteInput


def bessel_i0_series(x: float) -> float:
    """I0 by its power series, summed with compensated addition."""
    q = 0.25 * x * x
    term = 1.0
    terms = [term]
    for k in range(1, 400):
        term *= q / (k * k)
        terms.append(term)
        if term < 1e-18 * sum(terms[-3:]):
            break
    return math.fsum(terms)


def bessel_i1_series(x: float) -> float:
    q = 0.25 * x * x
    term = 0.5 * x
    terms = [term]
    for k in range(1, 400):
        term *= q / (k * (k + 1))
        terms.append(term)
        if term < 1e-18 * sum(terms[-3:]):
            break
    return math.fsum(terms)


def pt_spectrum_bruteforce(cm: TwoModeCM) -> tuple[float, float]:
    """Symplectic spectrum of the partial transpose by direct diagonalization.

    Partial transposition of the second mode flips the sign of p2; the
    symplectic eigenvalues are the magnitudes of eig(i Omega M_pt).
    """
    p = np.diag([1.0, 1.0, 1.0, -1.0])
    m_pt = p @ cm.m @ p
    omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    vals = np.sort(np.abs(np.linalg.eigvals(1j * omega @ m_pt)))
    return float(vals[0]), float(vals[2])


def pair_matrix(inp: GeneralBipartiteInput) -> np.ndarray:
    """8x8 CM of the two input pairs, modes ordered (q1,p1,...,q4,p4)."""
    v = np.zeros((8, 8))
    v[0:2, 0:2] = inp.a * np.eye(2)
    v[2:4, 2:4] = inp.b * np.eye(2)
    v[0:2, 2:4] = v[2:4, 0:2] = np.diag([inp.c_plus, inp.c_minus])
    v[4:6, 4:6] = inp.d * np.eye(2)
    v[6:8, 6:8] = inp.e * np.eye(2)
    v[4:6, 6:8] = v[6:8, 4:6] = np.diag([inp.f_plus, inp.f_minus])
    return v


def swap_conditional_oracle(inp: GeneralBipartiteInput) -> np.ndarray:
    """Bell measurement of modes 2 and 3 by explicit Gaussian conditioning.

    The balanced beam splitter sends the pair to u = (x2 - x3)/sqrt(2) and
    w = (x2 + x3)/sqrt(2); homodyne reads q of the u port and p of the w port.
    """
    v = pair_matrix(inp)
    x_idx = [0, 1, 6, 7]
    t = np.zeros((2, 8))
    t[0, 2], t[0, 4] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
    t[1, 3], t[1, 5] = 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)
    sxx = v[np.ix_(x_idx, x_idx)]
    sxy = v[x_idx, :] @ t.T
    syy = t @ v @ t.T
    return sxx - sxy @ np.linalg.solve(syy, sxy.T)


def swap_displaced_oracle(inp: GeneralBipartiteInput, g1: float, g4: float) -> np.ndarray:
    """Outcome-averaged CM of the displaced kept modes, by congruence.

    Stations displace with the raw (unnormalized) measured combinations
    u = q2 - q3 and w = p2 + p3:
        q1 -> q1 - g1 u,  p1 -> p1 + g1 w,  q4 -> q4 + g4 u,  p4 -> p4 + g4 w.
    Averaged over outcomes the displaced state is Gaussian with CM M V M^T.
    """
    v = pair_matrix(inp)
    sel = np.zeros((4, 8))
    sel[0, 0] = sel[1, 1] = 1.0
    sel[2, 6] = sel[3, 7] = 1.0
    meas = np.zeros((2, 8))
    meas[0, 2], meas[0, 4] = 1.0, -1.0
    meas[1, 3], meas[1, 5] = 1.0, 1.0
    gains = np.array([[-g1, 0.0], [0.0, g1], [g4, 0.0], [0.0, g4]])
    m = sel + gains @ meas
    return m @ v @ m.T


def random_standard_input(rng: np.random.Generator) -> GeneralBipartiteInput:
    """Random physical pair of phase-symmetric inputs (c+ = -c-, f+ = -f-)."""
    def pair():
        sq = Squeezing(rng.uniform(0.05, 2.0))
        cm = add_excess_noise(
            apply_loss(tmsv_cm(sq), 1.0, rng.uniform(0.0, 1.0)),
            rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.3),
        )
        return cm.m[0, 0], cm.m[2, 2], cm.m[0, 2]

    a, b, c = pair()
    e, d, f = pair()
    return GeneralBipartiteInput(a=a, b=b, c_plus=c, c_minus=-c,
                                 d=d, e=e, f_plus=f, f_minus=-f)


def random_general_input(rng: np.random.Generator) -> GeneralBipartiteInput:
    """Random physical input pair with independent c+ and c- (rejection sampled)."""
    def pair():
        while True:
            a = 1.0 + rng.uniform(0.0, 4.0)
            b = 1.0 + rng.uniform(0.0, 4.0)
            bound = math.sqrt((a - 1.0) * (b - 1.0)) + math.sqrt((a + 1.0) * (b + 1.0))
            cp, cm_ = rng.uniform(-bound, bound, 2)
            try:
                from cvsat.gaussian import StandardFormCM

                StandardFormCM(a=a, b=b, c_plus=cp, c_minus=cm_)
            except Exception:
                continue
            return a, b, cp, cm_

    a, b, cp, cm_ = pair()
    d, e, fp, fm = pair()
    return GeneralBipartiteInput(a=a, b=b, c_plus=cp, c_minus=cm_,
                                 d=d, e=e, f_plus=fp, f_minus=fm)


def fading_cdf(ch: FadingChannel, eta) -> np.ndarray:
    """P(transmittance <= eta), from the Rayleigh deflection law."""
    eta = np.asarray(eta, dtype=float)
    out = np.zeros_like(eta)
    inside = (eta > 0.0) & (eta < ch.eta0)
    d = ch.l_scale * (2.0 * np.log(ch.eta0 / eta[inside])) ** (1.0 / ch.lambda_shape)
    out[inside] = np.exp(-d * d / (2.0 * ch.sigma_b**2))
    out[eta >= ch.eta0] = 1.0
    return out


def dense_channel_average(ch: FadingChannel, f, n: int = 400_000) -> float:
    """Channel average of f(eta) by dense trapezoid in the deflection domain."""
    d = np.linspace(0.0, 14.0 * ch.sigma_b, n)
    eta = ch.eta0 * np.exp(-0.5 * (d / ch.l_scale) ** ch.lambda_shape)
    pdf = (d / ch.sigma_b**2) * np.exp(-0.5 * (d / ch.sigma_b) ** 2)
    return float(np.trapezoid(f(eta) * pdf, d))


def mc_ratio(num: np.ndarray, den: np.ndarray) -> tuple[float, float]:
    """Ratio of means and its standard error via the influence function."""
    ratio = num.mean() / den.mean()
    phi = (num - ratio * den) / den.mean()
    return float(ratio), float(phi.std(ddof=1) / math.sqrt(phi.size))


def _gauss1(x, var: float):
    return np.exp(-0.5 * x * x / var) / math.sqrt(2.0 * math.pi * var)


def _gauss2(x, y, cov: np.ndarray):
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] ** 2
    quad = (cov[1, 1] * x * x - 2.0 * cov[0, 1] * x * y + cov[0, 0] * y * y) / det
    return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))


def tap_moments_wigner(v: float, zeta: float, tap_t: float, q_th: float,
                       chi: float = 0.0, nodes: int = 160) -> dict:
    """Selection-weighted q moments by brute-force 3D integration.

    The post-channel q-sector density of (q_A, q_B) times a vacuum tap mode is
    integrated in the rotated frame (q_A, q_B', q_t), where the beam splitter
    gives q_B = sqrt(T) q_B' + sqrt(R) q_t and q_vac = sqrt(R) q_B' - sqrt(T) q_t.
    """
    b_q = 1.0 + zeta * (v - 1.0) + chi
    c_q = math.sqrt(zeta * (v * v - 1.0))
    cov = np.array([[v, c_q], [c_q, b_q]])
    root_t, root_r = math.sqrt(tap_t), math.sqrt(1.0 - tap_t)

    half = 10.0 * math.sqrt(max(v, b_q, 1.0))
    xs, ws = np.polynomial.legendre.leggauss(nodes)

    def stretch(lo, hi):
        return 0.5 * (hi - lo) * xs + 0.5 * (hi + lo), 0.5 * (hi - lo) * ws

    qa, wa = stretch(-half, half)
    qb, wb = stretch(-half, half)
    lo_t = max(q_th, -half)
    if lo_t >= half:
        raise ValueError("threshold beyond integration box")
    qt, wt = stretch(lo_t, half)

    a3 = qa[:, None, None]
    b3 = qb[None, :, None]
    t3 = qt[None, None, :]
    q_b_orig = root_t * b3 + root_r * t3
    q_vac = root_r * b3 - root_t * t3
    dens = _gauss2(a3, q_b_orig, cov) * _gauss1(q_vac, 1.0)
    w3 = wa[:, None, None] * wb[None, :, None] * wt[None, None, :]

    def moment(f):
        return float(np.sum(w3 * f * dens))

    return {
        "p_select": moment(np.ones_like(dens)),
        "q_a": moment(a3 * np.ones_like(dens)),
        "q_b": moment(b3 * np.ones_like(dens)),
        "q_a_sq": moment(a3 * a3 * np.ones_like(dens)),
        "q_b_sq": moment(b3 * b3 * np.ones_like(dens)),
        "q_ab": moment(a3 * b3 * np.ones_like(dens)),
    }
