"""Legendre polynomial machinery: evaluation, roots, quadrature, shifted bases.

Everything is built on the three-term recurrence

    (n + 1) P_{n+1}(x) = (2n + 1) x P_n(x) - n P_{n-1}(x),

which is numerically stable on [-1, 1] for every degree used here.  The
explicit monomial form is exposed separately (`monomial_coefficients`) for
callers that need power-basis coefficients; it is the ill-conditioned
representation and is guarded accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeTooLarge, DomainError, NonConvergence

__all__ = [
    "BasisSpec",
    "QuadratureRule",
    "legendre_eval",
    "legendre_deriv",
    "legendre_table",
    "legendre_roots",
    "gauss_quadrature",
    "monomial_coefficients",
    "shift_to_canonical",
    "shift_from_canonical",
]

_MAX_MONOMIAL_DEGREE = 30
_ROOT_TOL = 1e-14
_ROOT_MAX_ITERS = 100
_SHIFT_SLACK = 1e-12


@dataclass(frozen=True)
class BasisSpec:
    """A shifted Legendre basis: P_0 .. P_{degree_count-1} composed with the
    affine map taking [lo, hi] onto [-1, 1]."""

    degree_count: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.degree_count < 1:
            raise DomainError("basis needs at least one function")
        if not self.hi > self.lo:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on the canonical interval [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def mapped(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        """Affinely map the rule onto [lo, hi]."""
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        return mid + half * self.nodes, half * self.weights


def legendre_eval(n: int, x):
    """Evaluate P_n(x) by the three-term recurrence.

    `x` may be a scalar or an ndarray; the result has the same shape.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def legendre_deriv(n: int, x, order: int = 1):
    """Evaluate the `order`-th derivative of P_n at x.

    Differentiating the recurrence `order` times (Leibniz on the x*P_n term)
    gives, for each r,

        (n+1) P_{n+1}^(r) = (2n+1) (x P_n^(r) + r P_n^(r-1)) - n P_{n-1}^(r),

    so all derivative orders up to `order` are carried along together.
    Orders above n return zero.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    if order < 0:
        raise DomainError("derivative order must be non-negative")
    table = legendre_table(n + 1, x, order)
    out = table[order][n]
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def legendre_table(count: int, x, order: int = 0) -> list[np.ndarray]:
    """Values of P_j^(r) for j < count and r <= order.

    Returns a list indexed by derivative order; each entry is an ndarray of
    shape (count,) + shape(x).  This is the workhorse used by the collocation
    assembly, which needs whole columns of basis values at once.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    shape = (count,) + x.shape
    table = [np.zeros(shape) for _ in range(order + 1)]
    table[0][0] = 1.0
    if count == 1:
        return table
    table[0][1] = x
    if order >= 1:
        table[1][1] = 1.0
    for k in range(1, count - 1):
        for r in range(order + 1):
            lower = r * table[r - 1][k] if r else 0.0
            table[r][k + 1] = (
                (2 * k + 1) * (x * table[r][k] + lower) - k * table[r][k - 1]
            ) / (k + 1)
    return table


def legendre_roots(m: int) -> np.ndarray:
    """The m roots of P_m, ascending, by Newton iteration.

    Initial guesses are the Chebyshev-like estimates
    cos(pi (4k - 1) / (4m + 2)), k = 1..m.  Iteration stops when the update
    falls below 1e-14 in absolute value; exceeding 100 iterations raises
    NonConvergence.  Symmetry about the origin is enforced exactly by
    averaging mirrored pairs.
    """
    if m < 1:
        raise DomainError("need at least one root")
    k = np.arange(1, m + 1)
    x = np.cos(np.pi * (4 * k - 1) / (4 * m + 2))
    for _ in range(_ROOT_MAX_ITERS):
        p = legendre_eval(m, x)
        dp = legendre_deriv(m, x, 1)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) <= _ROOT_TOL:
            break
    else:
        raise NonConvergence(f"Newton iteration for P_{m} roots stalled")
    x = 0.5 * (x - x[::-1])
    x = np.sort(x)
    resid = np.max(np.abs(legendre_eval(m, x)))
    if resid > 1e-13:
        raise NonConvergence(f"P_{m} root residual {resid:.3e} exceeds 1e-13")
    return x


def gauss_quadrature(m: int) -> QuadratureRule:
    """m-point Gauss-Legendre rule on [-1, 1].

    Weights  w_k = 2 / ((1 - x_k^2) P_m'(x_k)^2);  exact for polynomials of
    degree <= 2m - 1.
    """
    x = legendre_roots(m)
    dp = legendre_deriv(m, x, 1)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return QuadratureRule(nodes=x, weights=w)


def monomial_coefficients(n: int) -> np.ndarray:
    """Power-basis coefficients of P_n, ascending (index = power of x).

    Built from the closed form

        P_n(x) = sum_v (-1)^v (2n-2v)! / (2^n (n-v)! (n-2v)! v!) x^(n-2v)

    by accumulating successive term ratios, so no factorial overflows occur.
    Degrees above 30 are refused (DegreeTooLarge): beyond that the power
    basis has shed too much precision to be useful.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    if n > _MAX_MONOMIAL_DEGREE:
        raise DegreeTooLarge(f"monomial form limited to degree {_MAX_MONOMIAL_DEGREE}, got {n}")
    coeffs = np.zeros(n + 1)
    # v = 0 term: (2n)! / (2^n n! n!) = prod_{i=1..n} (n+i)/(2i)
    term = 1.0
    for i in range(1, n + 1):
        term *= (n + i) / (2.0 * i)
    coeffs[n] = term
    for v in range(n // 2):
        power = n - 2 * v
        term *= -(power * (power - 1)) / (2.0 * (2 * n - 2 * v - 1) * (v + 1))
        coeffs[power - 2] = term
    return coeffs


def shift_to_canonical(x, spec: BasisSpec):
    """Map physical coordinates in [spec.lo, spec.hi] to [-1, 1].

    Points outside the interval by more than 1e-12 raise DomainError.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < spec.lo - _SHIFT_SLACK) or np.any(arr > spec.hi + _SHIFT_SLACK):
        raise DomainError(f"point {x} outside [{spec.lo}, {spec.hi}]")
    out = (2.0 * arr - spec.lo - spec.hi) / spec.width
    return out if out.ndim else float(out)


def shift_from_canonical(s, spec: BasisSpec):
    """Inverse of `shift_to_canonical`: [-1, 1] back to [spec.lo, spec.hi]."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < -1.0 - _SHIFT_SLACK) or np.any(arr > 1.0 + _SHIFT_SLACK):
        raise DomainError(f"canonical point {s} outside [-1, 1]")
    out = 0.5 * (spec.width * arr + spec.lo + spec.hi)
    return out if out.ndim else float(out)
