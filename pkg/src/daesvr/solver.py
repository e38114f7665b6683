"""Least-squares SVR collocation solver.

Each unknown is approximated in a shifted Legendre basis,

    u_i(t) ~ sum_j w[i, j] phi_j(t) + b_i            (b_i optional, default off)

and every equation is collocated at the mapped roots of P_m.  Collecting the
constraint residuals e and minimizing

    1/2 ||w||^2 + gamma/2 ||e||^2

gives, after eliminating w and e from the optimality system, the dual
problem

    (Omega + I/gamma) alpha = y,        Omega = Z^T Z,   w = Z alpha,

where column c of the feature matrix Z holds the equation's linear operator
applied to every basis function at collocation point c.  With biases the
dual picks up a bordered block: V alpha = 0 and (Omega + I/gamma) alpha +
V^T b = y, solved by elimination and a k x k Schur complement.  Side
conditions (initial values and derivatives) enter as extra constraint
columns under the same regularization.

Nonlinear equations keep the same objective but with residuals that are no
longer affine in w; those are minimized by a damped Gauss-Newton iteration.
Rectangle problems use a tensor-product basis phi_p(x) phi_q(t) and a
tensor collocation grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import (
    MissingExact,
    NonConvergence,
    NotPositiveDefinite,
    ShapeError,
    SingularSchur,
    ValidationError,
)
from .fractional import L1Grid, caputo_l1, caputo_poly
from .legendre import (
    BasisSpec,
    gauss_quadrature,
    legendre_roots,
    legendre_table,
    monomial_coefficients,
    shift_from_canonical,
    shift_to_canonical,
)
from .model import (
    Caputo,
    DaeProblem,
    Derivative,
    Identity,
    VolterraIntegral,
    is_linear,
)

__all__ = [
    "SolverConfig",
    "CollocationGrid",
    "DualSystem",
    "TrainedModel",
    "ResidualReport",
    "basis_counts",
    "build_grid",
    "apply_operator_to_basis",
    "assemble",
    "solve_linear",
    "gauss_newton",
    "solve",
    "report",
]

HARD_IC_SCALE = 1e3
TINY_EXACT = 1e-14


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs; defaults follow the benchmark configurations.

    `degree` is the number of basis functions per axis.  Left unset, it is
    matched to the constraint structure so that coefficients and constraints
    balance: m plus the number of side conditions carried by each unknown
    (applied to the time axis in 2D, with m functions on the space axis).
    An explicit value is used on every axis as given.
    """

    m: int = 10
    degree: Optional[int] = None
    gamma: float = 100.0
    include_bias: bool = False
    fractional_scheme: str = "analytic"
    l1_grid: int = 400
    quadrature_nodes: int = 32
    hard_ic: bool = False
    max_iters: int = 50
    step_tol: float = 1e-12
    residual_tol: float = 1e-14
    damping: float = 1e-3

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("collocation degree m must be >= 1")
        if self.degree is not None and self.degree < 1:
            raise ValidationError("basis degree must be >= 1")
        if not self.gamma > 0.0:
            raise ValidationError(f"regularization gamma must be > 0, got {self.gamma}")
        if self.fractional_scheme not in ("analytic", "l1"):
            raise ValidationError("fractional_scheme must be 'analytic' or 'l1'")
        if self.l1_grid < 2:
            raise ValidationError("l1_grid must be >= 2")
        if self.quadrature_nodes < 1:
            raise ValidationError("quadrature_nodes must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")


def _conditions_per_unknown(problem: DaeProblem) -> int:
    counts = [0] * problem.unknowns
    for sc in problem.side_conditions:
        counts[sc.target] += 1
    return max(counts) if counts else 0


def basis_counts(problem: DaeProblem, config: SolverConfig) -> tuple:
    """Basis-function counts (d_x, d_t); d_x is None for interval problems."""
    if config.degree is not None:
        d = config.degree
        return (d if problem.is_2d else None, d)
    extra = _conditions_per_unknown(problem)
    if problem.is_2d:
        return (config.m, config.m + extra)
    return (None, config.m + extra)


@dataclass(frozen=True)
class CollocationGrid:
    """Interior collocation points: mapped Legendre roots (tensorized in 2D)."""

    points: np.ndarray
    x_nodes: Optional[np.ndarray] = None
    t_nodes: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class DualSystem:
    """The saddle data: Omega = Z^T Z, bias row block V, targets y, gamma."""

    omega: np.ndarray
    v: Optional[np.ndarray]
    y: np.ndarray
    gamma: float


def build_grid(problem: DaeProblem, config: SolverConfig) -> CollocationGrid:
    """Mapped roots of P_m; the tensor product of per-axis roots in 2D."""
    roots = legendre_roots(config.m)
    if problem.is_2d:
        (xlo, xhi), (tlo, thi) = problem.domain
        xs = shift_from_canonical(roots, BasisSpec(1, xlo, xhi))
        ts = shift_from_canonical(roots, BasisSpec(1, tlo, thi))
        pts = np.array([(x, t) for x in xs for t in ts])
        return CollocationGrid(points=pts, x_nodes=xs, t_nodes=ts)
    lo, hi = problem.domain
    pts = shift_from_canonical(roots, BasisSpec(1, lo, hi))
    return CollocationGrid(points=pts)


@lru_cache(maxsize=64)
def _cached_rule(nodes: int):
    return gauss_quadrature(nodes)


def _caputo_basis(j: int, alpha: float, spec: BasisSpec, point: float, config: SolverConfig) -> float:
    if config.fractional_scheme == "analytic":
        return caputo_poly(monomial_coefficients(j), alpha, spec, point)
    length = point - spec.lo
    if length <= 0.0:
        return 0.0
    grid = L1Grid.uniform(spec.lo, point, config.l1_grid)
    s = shift_to_canonical(grid.points, spec)
    samples = legendre_table(j + 1, s)[0][j]
    return caputo_l1(samples, grid, alpha)


def _volterra_basis(j: int, kernel, spec: BasisSpec, point: float, config: SolverConfig) -> float:
    length = point - spec.lo
    if length <= 0.0:
        return 0.0
    qx, qw = _cached_rule(config.quadrature_nodes).mapped(spec.lo, point)
    vals = legendre_table(j + 1, shift_to_canonical(qx, spec))[0][j]
    kvals = np.array([kernel(point, s) for s in qx])
    return float(np.sum(qw * kvals * vals))


def apply_operator_to_basis(op, j: int, spec: BasisSpec, point: float, config: SolverConfig) -> float:
    """(L phi_j)(point) for a single interval basis function."""
    s = shift_to_canonical(point, spec)
    if isinstance(op, Identity):
        return float(legendre_table(j + 1, s)[0][j])
    if isinstance(op, Derivative):
        scale = (2.0 / spec.width) ** op.order
        return float(legendre_table(j + 1, s, op.order)[op.order][j]) * scale
    if isinstance(op, Caputo):
        return _caputo_basis(j, op.alpha, spec, point, config)
    if isinstance(op, VolterraIntegral):
        return _volterra_basis(j, op.kernel, spec, point, config)
    raise ValidationError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class _Side:
    """A side condition instantiated at a concrete point."""

    target: int
    point: object
    order: int
    value: float
    scale: float


class _Context:
    """Precomputed basis geometry shared by assembly and evaluation."""

    def __init__(self, problem: DaeProblem, grid: CollocationGrid, config: SolverConfig):
        self.problem = problem
        self.grid = grid
        self.config = config
        self.k = problem.unknowns
        d_x, d_t = basis_counts(problem, config)
        self.d_x = d_x
        self.d_t = d_t
        if problem.is_2d:
            (xlo, xhi), (tlo, thi) = problem.domain
            self.spec_x = BasisSpec(d_x, xlo, xhi)
            self.spec_t = BasisSpec(d_t, tlo, thi)
            self.D = d_x * d_t
        else:
            lo, hi = problem.domain
            self.spec_t = BasisSpec(d_t, lo, hi)
            self.spec_x = None
            self.D = d_t
        self.sides = self._expand_side_conditions()
        self.n_grid = len(grid)
        self.n_constraints = self.k * self.n_grid + len(self.sides)

    # -- side conditions ------------------------------------------------

    def _expand_side_conditions(self):
        out = []
        scale = HARD_IC_SCALE if self.config.hard_ic else 1.0
        for sc in self.problem.side_conditions:
            if self.problem.is_2d:
                x, t = sc.point
                xs = self.grid.x_nodes if x is None else [x]
                for xi in xs:
                    value = sc.value(xi) if callable(sc.value) else float(sc.value)
                    out.append(_Side(sc.target, (float(xi), t), sc.order, value, scale))
            else:
                out.append(_Side(sc.target, sc.point, sc.order, float(sc.value), scale))
        return out

    # -- basis rows -----------------------------------------------------

    def _axis_values(self, spec: BasisSpec, pts, order: int) -> np.ndarray:
        """(count, n) table of P_j^(order) at mapped points, physically scaled."""
        s = shift_to_canonical(np.asarray(pts, dtype=float), spec)
        tab = legendre_table(spec.degree_count, s, order)[order]
        if order:
            tab = tab * (2.0 / spec.width) ** order
        return tab

    def basis_row(self, point) -> np.ndarray:
        """Identity basis values at one point, shape (D,)."""
        if self.problem.is_2d:
            x, t = point
            bx = self._axis_values(self.spec_x, [x], 0)[:, 0]
            bt = self._axis_values(self.spec_t, [t], 0)[:, 0]
            return np.outer(bx, bt).ravel()
        return self._axis_values(self.spec_t, [point], 0)[:, 0]

    def operator_matrix(self, op, points) -> np.ndarray:
        """(n_points, D) matrix of (L phi_j)(point)."""
        if self.problem.is_2d:
            pts = np.asarray(points, dtype=float)
            x, t = pts[:, 0], pts[:, 1]
            if isinstance(op, Identity):
                bx = self._axis_values(self.spec_x, x, 0)
                bt = self._axis_values(self.spec_t, t, 0)
            elif isinstance(op, Derivative):
                if op.var == "x":
                    bx = self._axis_values(self.spec_x, x, op.order)
                    bt = self._axis_values(self.spec_t, t, 0)
                else:
                    bx = self._axis_values(self.spec_x, x, 0)
                    bt = self._axis_values(self.spec_t, t, op.order)
            else:
                raise ValidationError(f"operator {op!r} is interval-only")
            # row g, column p*d_t + q  <->  phi_p(x_g) phi_q(t_g)
            return (bx[:, None, :] * bt[None, :, :]).reshape(self.D, -1).T
        pts = np.asarray(points, dtype=float)
        if isinstance(op, Identity):
            return self._axis_values(self.spec_t, pts, 0).T
        if isinstance(op, Derivative):
            return self._axis_values(self.spec_t, pts, op.order).T
        out = np.empty((pts.size, self.d_t))
        for g, p in enumerate(pts):
            for j in range(self.d_t):
                out[g, j] = apply_operator_to_basis(op, j, self.spec_t, p, self.config)
        return out

    def op_applied_to_one(self, op, point) -> float:
        """(L 1)(point): what a bias term contributes through operator L."""
        if isinstance(op, Identity):
            return 1.0
        if isinstance(op, (Derivative, Caputo)):
            return 0.0
        if isinstance(op, VolterraIntegral):
            lo = self.problem.interval[0]
            if point - lo <= 0.0:
                return 0.0
            qx, qw = _cached_rule(self.config.quadrature_nodes).mapped(lo, point)
            return float(np.sum(qw * np.array([op.kernel(point, s) for s in qx])))
        raise ValidationError(f"unknown operator {op!r}")

    # -- constraint columns ----------------------------------------------

    def equation_blocks(self, eq_index: int):
        """Per-term (target, coeff values, operator matrix) over the grid."""
        eq = self.problem.equations[eq_index]
        pts = self.grid.points
        blocks = []
        for term in eq.terms:
            if self.problem.is_2d:
                coeffs = np.array([term.coeff(x, t) for x, t in pts])
            else:
                coeffs = np.array([term.coeff(t) for t in pts])
            blocks.append((term.target, coeffs, self.operator_matrix(term.op, pts)))
        return blocks

    def side_column(self, side: _Side) -> np.ndarray:
        col = np.zeros(self.k * self.D)
        op = Identity() if side.order == 0 else Derivative(side.order, "t")
        row = self.operator_matrix(op, [side.point])[0]
        lo = side.target * self.D
        col[lo : lo + self.D] = side.scale * row
        return col

    def constraint_points(self):
        """The physical point behind every constraint column, in order."""
        pts = list(self.grid.points) * self.k
        return pts + [s.point for s in self.sides]


def assemble(problem: DaeProblem, grid: CollocationGrid, config: SolverConfig):
    """Build the feature matrix Z and the dual system for a linear problem.

    Columns are ordered equation-major over the grid, then side conditions.
    Returns (Z, DualSystem).
    """
    problem.validate()
    if not is_linear(problem):
        raise ValidationError("assemble expects a linear problem; use gauss_newton")
    if len(problem.equations) == 0:
        raise ShapeError("no equations to assemble")
    ctx = _Context(problem, grid, config)
    n_grid, k, D = ctx.n_grid, ctx.k, ctx.D
    n_c = ctx.n_constraints
    Z = np.zeros((k * D, n_c))
    y = np.zeros(n_c)
    V = np.zeros((k, n_c))

    for i, eq in enumerate(problem.equations):
        cols = slice(i * n_grid, (i + 1) * n_grid)
        for target, coeffs, B in ctx.equation_blocks(i):
            rows = slice(target * D, (target + 1) * D)
            Z[rows, cols] += (coeffs[:, None] * B).T
        for term in eq.terms:
            lone = np.array([ctx.op_applied_to_one(term.op, p) for p in grid.points])
            if problem.is_2d:
                coeffs = np.array([term.coeff(x, t) for x, t in grid.points])
            else:
                coeffs = np.array([term.coeff(t) for t in grid.points])
            V[term.target, cols] += coeffs * lone
        if problem.is_2d:
            y[cols] = [eq.rhs(x, t) for x, t in grid.points]
        else:
            y[cols] = [eq.rhs(t) for t in grid.points]

    for s_idx, side in enumerate(ctx.sides):
        c = k * n_grid + s_idx
        Z[:, c] = ctx.side_column(side)
        y[c] = side.scale * side.value
        if side.order == 0:
            V[side.target, c] = side.scale

    omega = Z.T @ Z
    omega = 0.5 * (omega + omega.T)
    dual = DualSystem(
        omega=omega,
        v=V if config.include_bias else None,
        y=y,
        gamma=config.gamma,
    )
    return Z, dual


def _refined_solver(H: np.ndarray):
    """Cholesky solve with symmetric diagonal scaling and iterative refinement.

    The scaling (Jacobi equilibration) leaves the solution unchanged but
    keeps the factorization healthy when constraint columns have very
    different magnitudes, which is the norm for systems mixing second
    derivatives with plain point evaluations.
    """
    d = 1.0 / np.sqrt(np.diag(H))
    Hs = H * d[:, None] * d[None, :]
    try:
        factor = cho_factor(Hs, lower=True)
    except LinAlgError as err:
        raise NotPositiveDefinite(f"dual matrix is not positive definite: {err}") from err

    def solve_fn(b: np.ndarray) -> np.ndarray:
        scale = d if b.ndim == 1 else d[:, None]
        x = scale * cho_solve(factor, scale * b)
        for _ in range(2):
            x = x + scale * cho_solve(factor, scale * (b - H @ x))
        return x

    return solve_fn


def solve_linear(
    dual: DualSystem,
    Z: np.ndarray,
    problem: Optional[DaeProblem] = None,
    grid: Optional[CollocationGrid] = None,
    config: Optional[SolverConfig] = None,
) -> "TrainedModel":
    """Solve the dual system and reconstruct primal weights w = Z alpha."""
    n_c = dual.y.size
    if dual.omega.shape != (n_c, n_c) or Z.shape[1] != n_c:
        raise ShapeError(
            f"inconsistent dual system: omega {dual.omega.shape}, "
            f"Z {Z.shape}, y {dual.y.shape}"
        )
    H = dual.omega + np.eye(n_c) / dual.gamma
    hsolve = _refined_solver(H)
    if dual.v is not None:
        k = dual.v.shape[0]
        X = hsolve(dual.v.T)
        xy = hsolve(dual.y)
        S = dual.v @ X
        S = 0.5 * (S + S.T)
        if np.linalg.matrix_rank(S, tol=1e-12 * max(1.0, float(np.abs(S).max()))) < k:
            raise SingularSchur("bias block is rank deficient; biases not identifiable")
        biases = np.linalg.solve(S, dual.v @ xy)
        alpha = xy - X @ biases
    else:
        alpha = hsolve(dual.y)
        biases = None
    w = Z @ alpha
    errors = -alpha / dual.gamma

    ctx = None
    if problem is not None:
        ctx = _Context(problem, grid, config)
        w = w.reshape(ctx.k, ctx.D)
        if biases is None:
            biases = np.zeros(ctx.k)
    return TrainedModel(
        weights=w,
        biases=biases,
        alpha=alpha,
        errors=errors,
        problem=problem,
        grid=grid,
        config=config,
        _ctx=ctx,
    )


def gauss_newton(
    problem: DaeProblem,
    grid: CollocationGrid,
    config: SolverConfig,
    w0: Optional[np.ndarray] = None,
) -> "TrainedModel":
    """Minimize 1/2 ||w||^2 + gamma/2 sum_c r_c(w)^2 by damped Gauss-Newton.

    The linear operator terms contribute an exact, constant Jacobian block;
    the nonlinear closures are differentiated by forward finite differences
    in the unknown values.  The Levenberg parameter is halved after accepted
    steps and quadrupled after steps that increase the residual norm.
    Raises NonConvergence (with the best iterate attached) when the budget
    runs out.
    """
    problem.validate()
    if config.include_bias:
        raise ValidationError("bias terms are only supported on the linear path")
    if problem.is_2d:
        raise ValidationError("the Gauss-Newton path handles interval problems only")
    ctx = _Context(problem, grid, config)
    k, D, n_grid = ctx.k, ctx.D, ctx.n_grid
    n_w = k * D
    n_c = ctx.n_constraints
    gamma = config.gamma

    # constant linear part: r_lin = A w - y
    A = np.zeros((n_c, n_w))
    y = np.zeros(n_c)
    for i, eq in enumerate(problem.equations):
        rows = slice(i * n_grid, (i + 1) * n_grid)
        for target, coeffs, B in ctx.equation_blocks(i):
            A[rows, target * D : (target + 1) * D] += coeffs[:, None] * B
        y[rows] = [eq.rhs(t) for t in grid.points]
    for s_idx, side in enumerate(ctx.sides):
        c = k * n_grid + s_idx
        A[c] = ctx.side_column(side)
        y[c] = side.scale * side.value

    value_B = ctx.operator_matrix(Identity(), grid.points)  # (n_grid, D)
    closures = [eq.nonlinear for eq in problem.equations]

    def unknown_values(w: np.ndarray) -> np.ndarray:
        return value_B @ w.reshape(k, D).T  # (n_grid, k)

    def residual(w: np.ndarray) -> np.ndarray:
        r = A @ w - y
        if any(cl is not None for cl in closures):
            uv = unknown_values(w)
            for i, cl in enumerate(closures):
                if cl is None:
                    continue
                base = i * n_grid
                for g, t in enumerate(grid.points):
                    r[base + g] += cl(t, *uv[g])
        return r

    def jacobian(w: np.ndarray) -> np.ndarray:
        J = A.copy()
        uv = unknown_values(w)
        for i, cl in enumerate(closures):
            if cl is None:
                continue
            base = i * n_grid
            for g, t in enumerate(grid.points):
                vals = uv[g]
                f0 = cl(t, *vals)
                for u in range(k):
                    h = 1e-7 * max(1.0, abs(vals[u]))
                    bumped = vals.copy()
                    bumped[u] += h
                    dfdu = (cl(t, *bumped) - f0) / h
                    if dfdu != 0.0:
                        J[base + g, u * D : (u + 1) * D] += dfdu * value_B[g]
        return J

    w = np.zeros(n_w) if w0 is None else np.asarray(w0, dtype=float).ravel().copy()
    if w.size != n_w:
        raise ShapeError(f"initial weights must have length {n_w}, got {w.size}")
    lam = config.damping
    r = residual(w)
    best_w, best_obj = w.copy(), 0.5 * w @ w + 0.5 * gamma * (r @ r)
    converged = False
    iters = 0
    for iters in range(1, config.max_iters + 1):
        if np.max(np.abs(r)) <= config.residual_tol:
            converged = True
            break
        J = jacobian(w)
        grad = gamma * (J.T @ r) + w
        M = gamma * (J.T @ J) + (1.0 + lam) * np.eye(n_w)
        try:
            step = cho_solve(cho_factor(M, lower=True), -grad)
        except LinAlgError as err:
            raise NotPositiveDefinite(f"Gauss-Newton normal matrix failed: {err}") from err
        trial_w = w + step
        trial_r = residual(trial_w)
        if np.linalg.norm(trial_r) <= np.linalg.norm(r):
            w, r = trial_w, trial_r
            lam = max(lam * 0.5, 1e-15)
            obj = 0.5 * w @ w + 0.5 * gamma * (r @ r)
            if obj < best_obj:
                best_w, best_obj = w.copy(), obj
            if np.max(np.abs(step)) <= config.step_tol:
                converged = True
                break
        else:
            lam *= 4.0

    def finish(weights: np.ndarray, resid: np.ndarray, n_iters: int) -> TrainedModel:
        return TrainedModel(
            weights=weights.reshape(k, D),
            biases=np.zeros(k),
            alpha=-gamma * resid,
            errors=resid.copy(),
            problem=problem,
            grid=grid,
            config=config,
            iterations=n_iters,
            _ctx=ctx,
        )

    if not converged:
        raise NonConvergence(
            f"Gauss-Newton did not converge in {config.max_iters} iterations",
            best=finish(best_w, residual(best_w), iters),
        )
    return finish(w, r, iters)


def solve(problem: DaeProblem, config: Optional[SolverConfig] = None) -> "TrainedModel":
    """Train a model: dual linear solve when possible, Gauss-Newton otherwise."""
    config = config or SolverConfig()
    grid = build_grid(problem, config)
    if is_linear(problem):
        Z, dual = assemble(problem, grid, config)
        return solve_linear(dual, Z, problem=problem, grid=grid, config=config)
    return gauss_newton(problem, grid, config)


@dataclass
class TrainedModel:
    """A trained approximation; also a residual candidate (value/apply_op)."""

    weights: np.ndarray
    biases: Optional[np.ndarray]
    alpha: np.ndarray
    errors: np.ndarray
    problem: Optional[DaeProblem] = None
    grid: Optional[CollocationGrid] = None
    config: Optional[SolverConfig] = None
    iterations: int = 0
    _ctx: Optional[_Context] = field(default=None, repr=False)

    def _context(self) -> _Context:
        if self._ctx is None:
            raise ValidationError("model was trained without problem context")
        return self._ctx

    @property
    def squared_error_sum(self) -> float:
        return float(self.errors @ self.errors)

    def evaluate(self, unknown: int, point) -> float:
        """Primal evaluation: weights against the identity basis row."""
        ctx = self._context()
        row = ctx.basis_row(point)
        out = float(row @ self.weights[unknown])
        if self.biases is not None:
            out += float(self.biases[unknown])
        return out

    # candidate interface --------------------------------------------------

    def value(self, unknown: int, point) -> float:
        return self.evaluate(unknown, point)

    def apply_op(self, unknown: int, op, point) -> float:
        ctx = self._context()
        row = ctx.operator_matrix(op, [point])[0]
        out = float(row @ self.weights[unknown])
        if self.biases is not None and self.biases[unknown]:
            out += self.biases[unknown] * ctx.op_applied_to_one(op, point)
        return out

    # dual-form evaluation --------------------------------------------------

    def evaluate_kernel_form(self, unknown: int, point) -> float:
        """Dual evaluation through the operator-applied kernel sums.

        Rebuilds each constraint's operator-applied basis values and
        contracts them with the dual coefficients; agrees with `evaluate`
        up to solver precision on linear problems.
        """
        ctx = self._context()
        problem = self.problem
        if not is_linear(problem):
            raise ValidationError("kernel-form evaluation requires a linear problem")
        phi = ctx.basis_row(point)
        n_grid, D = ctx.n_grid, ctx.D
        lo = unknown * D
        total = 0.0
        for i in range(problem.unknowns):
            cols = slice(i * n_grid, (i + 1) * n_grid)
            alpha_block = self.alpha[cols]
            for target, coeffs, B in ctx.equation_blocks(i):
                if target != unknown:
                    continue
                # K(point, p_c) = phi(point) . coeff(p_c) (L phi)(p_c)
                total += alpha_block @ ((coeffs[:, None] * B) @ phi)
        for s_idx, side in enumerate(ctx.sides):
            c = problem.unknowns * n_grid + s_idx
            col = ctx.side_column(side)
            total += self.alpha[c] * (col[lo : lo + D] @ phi)
        if self.biases is not None:
            total += float(self.biases[unknown])
        return float(total)


@dataclass(frozen=True)
class ReportRow:
    point: object
    exact: float
    approx: float
    rel_err: float
    abs_err: float
    near_zero: bool


@dataclass(frozen=True)
class ResidualReport:
    """Per-unknown error rows at probe points plus l2 norms."""

    rows: tuple          # rows[u] is a tuple of ReportRow
    l2: np.ndarray       # per-unknown sqrt(sum abs_err^2)
    probes: tuple


def report(model: TrainedModel, probes) -> ResidualReport:
    """Error table of the model against the problem's exact solution."""
    problem = model.problem
    if problem is None or problem.exact is None:
        raise MissingExact("problem carries no exact solution")
    rows = []
    l2 = np.zeros(problem.unknowns)
    for u in range(problem.unknowns):
        urows = []
        for p in probes:
            args = tuple(p) if problem.is_2d else (p,)
            exact = float(problem.exact[u](*args))
            approx = model.evaluate(u, p)
            abs_err = abs(exact - approx)
            near_zero = abs(exact) < TINY_EXACT
            rel = abs_err if near_zero else abs_err / abs(exact)
            urows.append(ReportRow(p, exact, approx, rel, abs_err, near_zero))
        l2[u] = math.sqrt(math.fsum(r.abs_err**2 for r in urows))
        rows.append(tuple(urows))
    return ResidualReport(rows=tuple(rows), l2=l2, probes=tuple(probes))
