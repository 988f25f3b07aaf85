"""Descent methods driven by conjugate-coordinate curvature.

Every method here takes steps of the form

    delta_c = -alpha * inv(M) (d loss / d c)^H

where M is an admissible Hermitian scaling picked by a
:class:`QStrategy`: the identity, the full Newton Hessian, its
block-diagonal part, the Gauss-Newton Hessian of a least-squares
problem, or its block-diagonal part.  Admissibility of M is what keeps
the top and bottom halves of delta_c conjugates of each other, so the
iteration never leaves the set of valid conjugate-coordinate vectors,
and positive definiteness of M is what makes the predicted first-order
change nonpositive for every gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coords import as_complex_vector, matrix_residual, swap
from .errors import (
    DimensionError,
    Diverged,
    InadmissibleQ,
    SingularMatrix,
    SingularQ,
)
from .hessian import HessianQuad, assemble, hessian_quad
from .lsq import (
    LsqProblem,
    gauss_newton_blocks,
    gauss_newton_hessian,
    loss as lsq_loss,
    loss_pair,
    newton_quad,
)
from .wirtinger import JacobianPair, ScalarField, VectorField, WirtingerPair, cogradients

STRATEGY_KINDS = (
    "identity",
    "newton",
    "quasi_newton",
    "gauss_newton",
    "quasi_gauss_newton",
)

#: Default step size per strategy; curvature-scaled steps start at 1.
DEFAULT_STEP_SIZE = {
    "identity": 0.1,
    "newton": 1.0,
    "quasi_newton": 1.0,
    "gauss_newton": 1.0,
    "quasi_gauss_newton": 1.0,
}

#: Loss level treated as numerically divergent.
DIVERGENCE_LOSS = 1e12

_COND_LIMIT = 1.0 / np.finfo(float).eps
_Q_ADMISSIBLE_TOL = 1e-9
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class QStrategy:
    """Choice of descent scaling matrix.

    ``damping`` adds that multiple of the identity to the scaling,
    which is the usual remedy when a Newton matrix is indefinite or
    near-singular.
    """

    kind: str = "newton"
    damping: float = 0.0

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"kind must be one of {STRATEGY_KINDS}, got {self.kind!r}")
        if not self.damping >= 0.0:
            raise ValueError("damping must be nonnegative")


@dataclass(frozen=True)
class OptimizerConfig:
    """Iteration controls for :func:`minimize`.

    ``step_size`` of None picks the strategy default (1.0 for
    curvature-scaled strategies, 0.1 for the identity).  Termination is
    on the infinity norm of the loss derivative row.
    """

    step_size: float | None = None
    max_iters: int = 100
    grad_tol: float = 1e-8
    backtracking: str = "armijo"
    armijo_beta: float = 0.5
    armijo_c1: float = 1e-4
    record_trace: bool = True

    def __post_init__(self):
        if self.step_size is not None and not self.step_size > 0.0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.grad_tol >= 0.0:
            raise ValueError("grad_tol must be nonnegative")
        if self.backtracking not in ("off", "armijo"):
            raise ValueError("backtracking must be 'off' or 'armijo'")
        if not 0.0 < self.armijo_beta < 1.0:
            raise ValueError("armijo_beta must lie in (0, 1)")
        if not 0.0 < self.armijo_c1 < 1.0:
            raise ValueError("armijo_c1 must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class StepDiagnostics:
    """What the scaling looked like when a step was computed."""

    kind: str
    positive_definite: bool
    condition: float
    predicted_decrease: float


@dataclass(frozen=True, eq=False)
class IterationRecord:
    """One row of an optimization trace.

    ``z`` and ``loss`` describe the iterate the step was taken from;
    the remaining fields describe that step.  The terminal row carries
    a zero step and NaN scaling diagnostics.
    """

    iteration: int
    z: np.ndarray
    loss: float
    grad_norm: float
    step_norm: float
    q_condition: float
    q_positive_definite: bool | None


class IterationTrace:
    """Ordered iteration records with list semantics."""

    def __init__(self):
        self.records: list[IterationRecord] = []

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    @property
    def losses(self) -> np.ndarray:
        return np.array([rec.loss for rec in self.records])


@dataclass(frozen=True, eq=False)
class MinimizeResult:
    """Terminal state of a :func:`minimize` run."""

    z: np.ndarray
    loss: float
    grad_norm: float
    converged: bool
    reason: str
    iterations: int
    trace: IterationTrace


class _Objective:
    """Uniform view of a ScalarField or LsqProblem target."""

    def __init__(self, target):
        if isinstance(target, LsqProblem):
            self.problem = target
            self.field = None
            self.name = "least-squares loss"
        elif isinstance(target, ScalarField):
            self.problem = None
            self.field = target
            self.name = target.name
        else:
            raise TypeError(f"expected a ScalarField or LsqProblem, got {type(target).__name__}")

    def loss(self, z) -> float:
        if self.problem is not None:
            return lsq_loss(self.problem, z)
        return self.field(z)

    def pair(self, z) -> WirtingerPair:
        if self.problem is not None:
            return loss_pair(self.problem, z)
        return cogradients(self.field, z)

    def quad(self, z) -> HessianQuad:
        if self.problem is not None:
            return newton_quad(self.problem, z)
        return hessian_quad(self.field, z)

    def gauss_matrix(self, z) -> np.ndarray:
        if self.problem is None:
            raise ValueError("Gauss-Newton scalings need a least-squares problem")
        return gauss_newton_hessian(self.problem, z)

    def gauss_blocks(self, z):
        if self.problem is None:
            raise ValueError("Gauss-Newton scalings need a least-squares problem")
        return gauss_newton_blocks(self.problem, z)


def _block_diag(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    n = top.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = top
    out[n:, n:] = bottom
    return out


def _scaling_matrix(objective: _Objective, z: np.ndarray, strategy: QStrategy) -> np.ndarray:
    n = z.shape[0]
    kind = strategy.kind
    if kind == "identity":
        m = np.eye(2 * n, dtype=complex)
    elif kind == "newton":
        m = assemble(objective.quad(z)).hc_complex
    elif kind == "quasi_newton":
        quad = objective.quad(z)
        m = _block_diag(quad.hzz, quad.hzbzb)
    elif kind == "gauss_newton":
        m = objective.gauss_matrix(z)
    else:
        uzz, _ = objective.gauss_blocks(z)
        m = _block_diag(uzz, np.conj(uzz))
    if strategy.damping > 0.0:
        m = m + strategy.damping * np.eye(2 * n)
    return m


def descent_step(target, p, strategy: QStrategy = QStrategy()) -> tuple[np.ndarray, StepDiagnostics]:
    """Scaled descent direction in conjugate coordinates, at unit step.

    Returns the admissible vector delta_c = -inv(M) (d loss / d c)^H
    together with diagnostics of the scaling M: positive definiteness
    (by attempted Cholesky), a condition estimate, and the first-order
    loss change predicted for a unit step.

    Raises
    ------
    InadmissibleQ
        If the scaling violates the block pairing constraint.
    SingularQ
        If the scaling cannot be solved against; damping in the
        strategy is the usual fix.
    """
    objective = target if isinstance(target, _Objective) else _Objective(target)
    z = as_complex_vector(p)
    pair = objective.pair(z)
    grad_c = np.conj(np.concatenate([pair.dz, pair.dzbar]))

    m = _scaling_matrix(objective, z, strategy)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    resid = matrix_residual(m)
    if resid > _Q_ADMISSIBLE_TOL * scale:
        raise InadmissibleQ(
            f"{strategy.kind} scaling violates the pairing constraint, residual {resid:.3e}"
        )
    try:
        np.linalg.cholesky(m)
        positive_definite = True
    except np.linalg.LinAlgError:
        positive_definite = False
    condition = float(np.linalg.cond(m))
    if not np.isfinite(condition) or condition > _COND_LIMIT:
        raise SingularQ(
            f"{strategy.kind} scaling is numerically singular "
            f"(condition {condition:.3e}); add damping"
        )
    try:
        delta_c = -np.linalg.solve(m, grad_c)
    except np.linalg.LinAlgError as exc:
        raise SingularQ(f"{strategy.kind} scaling is singular; add damping") from exc
    # The exact solution pairs conjugate halves; strip solver rounding.
    delta_c = 0.5 * (delta_c + swap(np.conj(delta_c)))
    predicted = float(np.real(np.conj(grad_c) @ delta_c))
    diag = StepDiagnostics(
        kind=strategy.kind,
        positive_definite=positive_definite,
        condition=condition,
        predicted_decrease=predicted,
    )
    return delta_c, diag


def newton_update_z(quad: HessianQuad, pair: WirtingerPair) -> np.ndarray:
    """Newton correction computed in the n complex unknowns only.

    Eliminates the conjugate half of the 2n x 2n Newton system through
    the Schur complement of the lower-right block:

        delta_z = inv(A - B inv(D) C) (B inv(D) (df/dconj)^H - (df/dz)^H)

    with (A, B, C, D) the curvature blocks.  When the off-diagonal
    blocks vanish this reduces to -inv(A) (df/dz)^H.  Matches the full
    2n solve to rounding.

    Raises
    ------
    SingularMatrix
        If the conjugate block or the Schur complement cannot be
        inverted.
    """
    if quad.n != pair.n:
        raise DimensionError("curvature and derivative dimensions differ")
    rhs_z = np.conj(pair.dz)
    rhs_zbar = np.conj(pair.dzbar)
    try:
        d_inv_c = np.linalg.solve(quad.hzbzb, quad.hzzb)
        d_inv_rhs = np.linalg.solve(quad.hzbzb, rhs_zbar)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("conjugate curvature block is singular") from exc
    schur = quad.hzz - quad.hzbz @ d_inv_c
    try:
        return np.linalg.solve(schur, quad.hzbz @ d_inv_rhs - rhs_z)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("Schur complement is singular") from exc


def minimize(
    target,
    z0,
    strategy: QStrategy = QStrategy(),
    config: OptimizerConfig = OptimizerConfig(),
) -> MinimizeResult:
    """Iterate scaled descent steps until the derivative row is small.

    Parameters
    ----------
    target : ScalarField or LsqProblem
        Real loss to minimize.
    z0 : array-like
        Starting point in C^n.
    strategy : QStrategy
        Scaling choice and damping.
    config : OptimizerConfig
        Step size, iteration and tolerance controls.  With Armijo
        backtracking enabled the recorded loss sequence is
        non-increasing.

    Raises
    ------
    Diverged
        If the loss exceeds 1e12 or turns non-finite; the partial trace
        rides on the exception.
    """
    objective = _Objective(target)
    z = as_complex_vector(z0)
    trace = IterationTrace()
    alpha0 = config.step_size if config.step_size is not None else DEFAULT_STEP_SIZE[strategy.kind]

    def record(iteration, z_at, loss_at, grad_at, step_norm, diag: StepDiagnostics | None):
        if not config.record_trace:
            return
        trace.append(
            IterationRecord(
                iteration=iteration,
                z=z_at.copy(),
                loss=loss_at,
                grad_norm=grad_at,
                step_norm=step_norm,
                q_condition=diag.condition if diag is not None else float("nan"),
                q_positive_definite=diag.positive_definite if diag is not None else None,
            )
        )

    loss_here = objective.loss(z)
    if not np.isfinite(loss_here) or loss_here > DIVERGENCE_LOSS:
        raise Diverged(f"loss {loss_here!r} at the starting point", trace=trace)

    reason = "max_iters"
    converged = False
    iterations = 0
    grad_norm = float("nan")
    for k in range(config.max_iters + 1):
        pair = objective.pair(z)
        grad_norm = float(np.max(np.abs(pair.dz), initial=0.0))
        if grad_norm <= config.grad_tol:
            record(k, z, loss_here, grad_norm, 0.0, None)
            converged = True
            reason = "converged"
            break
        if k == config.max_iters:
            record(k, z, loss_here, grad_norm, 0.0, None)
            break
        delta_c, diag = descent_step(objective, z, strategy)
        n = z.shape[0]
        delta_z = delta_c[:n]
        direction_slope = 2.0 * float(np.real(pair.dz @ delta_z))

        alpha = alpha0
        if config.backtracking == "armijo":
            accepted = False
            for _ in range(_MAX_BACKTRACKS):
                candidate = z + alpha * delta_z
                loss_new = objective.loss(candidate)
                if np.isfinite(loss_new) and loss_new <= loss_here + config.armijo_c1 * alpha * direction_slope:
                    accepted = True
                    break
                alpha *= config.armijo_beta
            if not accepted:
                record(k, z, loss_here, grad_norm, 0.0, diag)
                reason = "line_search_failed"
                break
        else:
            candidate = z + alpha * delta_z
            loss_new = objective.loss(candidate)

        if not np.isfinite(loss_new) or loss_new > DIVERGENCE_LOSS:
            record(k, z, loss_here, grad_norm, float(np.linalg.norm(alpha * delta_z)), diag)
            raise Diverged(f"loss reached {loss_new!r} at iteration {k}", trace=trace)

        record(k, z, loss_here, grad_norm, float(np.linalg.norm(alpha * delta_z)), diag)
        z = candidate
        loss_here = loss_new
        iterations = k + 1

    return MinimizeResult(
        z=z,
        loss=loss_here,
        grad_norm=grad_norm,
        converged=converged,
        reason=reason,
        iterations=iterations,
        trace=trace,
    )


def check_minimum(quad: HessianQuad, tol: float = 1e-10) -> str:
    """Classify a stationary point from its curvature blocks.

    Returns one of ``"local_min"``, ``"saddle_or_max"``,
    ``"indefinite"``, or ``"singular"``.  This is the one place the
    package eigendecomposes a curvature matrix; any eigenvalue within
    ``tol`` of zero, relative to the spectral radius, reports
    ``"singular"``.
    """
    hc = assemble(quad).hc_complex
    eigs = np.linalg.eigvalsh(hc)
    radius = float(np.max(np.abs(eigs), initial=0.0))
    if radius == 0.0 or float(np.min(np.abs(eigs))) <= tol * radius:
        return "singular"
    if np.all(eigs > 0.0):
        return "local_min"
    if np.all(eigs < 0.0):
        return "saddle_or_max"
    return "indefinite"


def lagrangian(loss_field: ScalarField, constraint: VectorField, multiplier) -> ScalarField:
    """Real-valued Lagrangian loss(z) + Re{lambda^H g(z)}.

    One complex multiplier entry per constraint component carries both
    real penalties Re g and Im g.  Analytic derivatives are attached
    when both the loss and the constraint have them.

    Raises
    ------
    DimensionError
        If the multiplier length differs from the constraint dimension.
    """
    lam = as_complex_vector(multiplier)
    if lam.shape[0] != constraint.m:
        raise DimensionError(
            f"multiplier has length {lam.shape[0]}, constraint has {constraint.m} components"
        )

    def fn(z):
        return loss_field(z) + float(np.real(np.conj(lam) @ constraint(z)))

    cograd = None
    if loss_field.cogradient_fn is not None and constraint.jacobian_fn is not None:
        def cograd(z):
            base = cogradients(loss_field, z)
            jac: JacobianPair = cogradients(constraint, z)
            dz = base.dz + 0.5 * (np.conj(lam) @ jac.jz + lam @ np.conj(jac.jzbar))
            dzbar = base.dzbar + 0.5 * (np.conj(lam) @ jac.jzbar + lam @ np.conj(jac.jz))
            return WirtingerPair(dz, dzbar)

    return ScalarField(fn, cogradient_fn=cograd, name=f"lagrangian of {loss_field.name}")
