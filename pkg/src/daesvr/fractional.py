"""Caputo fractional derivatives: analytic rules for polynomials, the L1
finite-difference scheme for sampled functions, and the Gamma function.

The analytic path rests on the monomial rule

    D^a t^k = Gamma(k+1) / Gamma(k+1-a) * t^(k-a)      (k >= ceil(a))
    D^a t^k = 0                                        (k <  ceil(a))

with the derivative taken from base point 0.  Polynomials over an arbitrary
interval [lo, hi] are handled by re-expanding them in powers of (t - lo),
which keeps the base-point convention of the operator intact.

The L1 scheme is a piecewise-linear quadrature of the Caputo integral on a
uniform grid; its truncation order is 2 - a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, GridError

__all__ = [
    "L1Grid",
    "gamma_fn",
    "caputo_monomial",
    "caputo_poly",
    "caputo_l1",
]


def gamma_fn(z: float) -> float:
    """Gamma(z) for z > 0; non-positive arguments raise DomainError."""
    if not z > 0.0:
        raise DomainError(f"gamma_fn requires z > 0, got {z}")
    return math.gamma(z)


def _check_analytic_order(alpha: float) -> None:
    if not alpha > 0.0 or float(alpha).is_integer():
        raise DomainError(f"fractional order must be positive and non-integer, got {alpha}")


def caputo_monomial(k: int, alpha: float, x: float) -> float:
    """Caputo derivative of order alpha of t^k, base point 0, evaluated at x.

    Powers below ceil(alpha) are annihilated.
    """
    _check_analytic_order(alpha)
    if k < 0:
        raise DomainError("monomial power must be non-negative")
    if x < 0.0:
        raise DomainError(f"evaluation point must be >= 0, got {x}")
    if k < math.ceil(alpha):
        return 0.0
    return gamma_fn(k + 1) / gamma_fn(k + 1 - alpha) * x ** (k - alpha)


@lru_cache(maxsize=2048)
def _tau_coefficients(coeffs: tuple, width: float) -> tuple:
    """Re-expand p(s), s = 2(t-lo)/width - 1, in powers of tau = t - lo.

    Done in exact rational arithmetic: the alternating binomial sums suffer
    heavy cancellation in floating point, and the inputs (dyadic-rational
    coefficients, binomials, powers of 2/width) are all exactly
    representable as Fractions.
    """
    two_over_w = Fraction(2) / Fraction(width)
    out = [Fraction(0) for _ in coeffs]
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        fc = Fraction(c)
        for r in range(k + 1):
            sign = -1 if (k - r) % 2 else 1
            out[r] += fc * math.comb(k, r) * two_over_w**r * sign
    return tuple(float(v) for v in out)


def caputo_poly(coeffs, alpha: float, spec, x: float) -> float:
    """Caputo derivative (base point spec.lo) of the shifted polynomial.

    `coeffs` are power-basis coefficients (ascending) of a polynomial p in
    the canonical variable s; the function differentiated is p composed with
    the affine map from [spec.lo, spec.hi] onto [-1, 1].  Passing the output
    of `monomial_coefficients(n)` therefore differentiates the n-th shifted
    Legendre basis function.
    """
    _check_analytic_order(alpha)
    tau = x - spec.lo
    if tau < -1e-12:
        raise DomainError(f"point {x} below base point {spec.lo}")
    tau = max(tau, 0.0)
    q = _tau_coefficients(tuple(float(c) for c in coeffs), spec.width)
    start = math.ceil(alpha)
    if tau == 0.0:
        return 0.0
    terms = [
        q[r] * gamma_fn(r + 1) / gamma_fn(r + 1 - alpha) * tau ** (r - alpha)
        for r in range(start, len(q))
    ]
    return math.fsum(terms)


@dataclass(frozen=True)
class L1Grid:
    """Uniform grid x_0 < x_1 < ... < x_m for the L1 scheme."""

    points: np.ndarray
    spacing: float = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise GridError("L1 grid needs at least two points")
        steps = np.diff(pts)
        if np.any(steps <= 0.0):
            raise GridError("L1 grid must be strictly increasing")
        h = float(steps[0])
        if np.max(np.abs(steps - h)) > 1e-12 * max(h, 1.0):
            raise GridError("L1 grid must be equidistant")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spacing", h)

    @classmethod
    def uniform(cls, lo: float, hi: float, intervals: int) -> "L1Grid":
        if intervals < 1:
            raise GridError("need at least one interval")
        return cls(points=np.linspace(lo, hi, intervals + 1))

    def __len__(self) -> int:
        return self.points.size


def caputo_l1(samples, grid: L1Grid, alpha: float) -> float:
    """L1 approximation of the Caputo derivative of order alpha at x_m.

    With g_k = ((x_m - x_k)^(1-a) - (x_m - x_{k+1})^(1-a)) / (Gamma(2-a) h),
    the telescoped sum over sample values reduces to

        sum_{k=0}^{m-1} g_k (h_{k+1} - h_k),

    i.e. the standard L1 quadrature of the fractional integral of the
    piecewise-linear interpolant.  Truncation error is O(h^(2-a)).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"L1 scheme requires 0 < alpha < 1, got {alpha}")
    h = np.asarray(samples, dtype=float)
    if h.ndim != 1 or h.size != len(grid):
        raise GridError(f"expected {len(grid)} samples, got {h.shape}")
    x = grid.points
    xm = x[-1]
    beta = 1.0 - alpha
    g = ((xm - x[:-1]) ** beta - (xm - x[1:]) ** beta) / (
        gamma_fn(2.0 - alpha) * grid.spacing
    )
    return float(g @ np.diff(h))
