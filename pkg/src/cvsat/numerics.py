"""Deterministic quadrature, special functions, and a seeded Monte Carlo engine.

Integrands are evaluated on whole node arrays at once, so callables passed in
must accept numpy arrays (plain arithmetic expressions broadcast as is).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, NumericalError


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule: nodes_1d points on each of `subdivisions` panels."""

    nodes_1d: int = 64
    subdivisions: int = 8

    def __post_init__(self) -> None:
        if self.nodes_1d < 8:
            raise DomainError(f"nodes_1d must be >= 8, got {self.nodes_1d}")
        if self.subdivisions < 1:
            raise DomainError(f"subdivisions must be >= 1, got {self.subdivisions}")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class McSpec:
    """Monte Carlo sample count and seed; same (samples, seed) gives identical output."""

    samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.samples < 10_000:
            raise DomainError(f"samples must be >= 10000, got {self.samples}")
        if not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def panel_nodes(
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUAD,
    subdivisions: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Gauss-Legendre rule on [lo, hi]."""
    if not (lo <= hi):
        raise DomainError(f"integration bounds must satisfy lo <= hi, got [{lo}, {hi}]")
    subs = spec.subdivisions if subdivisions is None else subdivisions
    xg, wg = _leggauss(spec.nodes_1d)
    edges = np.linspace(lo, hi, subs + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def _eval_on(f, *nodes: np.ndarray) -> np.ndarray:
    y = np.asarray(f(*nodes), dtype=float)
    shape = np.broadcast_shapes(*(n.shape for n in nodes))
    if y.shape != shape:
        y = np.broadcast_to(y, shape).copy()
    if not np.all(np.isfinite(y)):
        raise NumericalError("integrand returned non-finite values")
    return y


def integrate_1d(f, lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Composite Gauss-Legendre estimate of the integral of f over [lo, hi]."""
    if lo == hi:
        return 0.0
    x, w = panel_nodes(lo, hi, spec)
    return float(w @ _eval_on(f, x))


def integrate_2d(
    f,
    box: tuple[tuple[float, float], tuple[float, float]],
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Tensor-product Gauss-Legendre estimate of the integral of f(x, y) over a box."""
    (lo1, hi1), (lo2, hi2) = box
    if lo1 == hi1 or lo2 == hi2:
        return 0.0
    x, wx = panel_nodes(lo1, hi1, spec)
    y, wy = panel_nodes(lo2, hi2, spec)
    vals = _eval_on(f, x[:, None], y[None, :])
    return float(wx @ vals @ wy)


def erfc(x):
    """Complementary error function; accepts scalars or arrays."""
    return special.erfc(x)


def bessel_i(order: int, x):
    """Modified Bessel function I0 or I1 for x >= 0."""
    if order not in (0, 1):
        raise DomainError(f"order must be 0 or 1, got {order}")
    if np.any(np.asarray(x) < 0.0):
        raise DomainError("bessel_i requires x >= 0")
    return special.i0(x) if order == 0 else special.i1(x)


def mc_expectation(sampler, g, spec: McSpec) -> tuple[float, float]:
    """Sample mean and standard error of g over seeded i.i.d. draws.

    sampler(rng, n) must return an array of shape (n,) or a tuple of such
    arrays; g receives them positionally and returns values of shape (n,).
    """
    rng = np.random.default_rng(spec.seed)
    draws = sampler(rng, spec.samples)
    if not isinstance(draws, tuple):
        draws = (draws,)
    vals = np.asarray(g(*draws), dtype=float)
    if vals.ndim == 0:
        vals = np.full(spec.samples, float(vals))
    if not np.all(np.isfinite(vals)):
        raise NumericalError("Monte Carlo integrand returned non-finite values")
    mean = float(vals.mean())
    std_err = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return mean, std_err
