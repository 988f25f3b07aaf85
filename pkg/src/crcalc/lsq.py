"""Weighted least squares for complex-valued, possibly non-holomorphic models.

The loss is half the weighted squared residual

    loss(z) = (y - g(z))^H W (y - g(z)) / 2

with a Hermitian positive definite weight W.  Both derivative blocks of
the model enter through the m x 2n compound jacobian G = [jz, jzbar].
The raw normal matrix G^H W G is not an admissible curvature matrix,
but its admissible projection is, and that projection is the
Gauss-Newton Hessian.  The full Newton Hessian subtracts one projected
curvature correction per residual component; the corrections vanish for
models linear in (z, conj(z)) and at zero residual.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._parallel import thread_count
from .coords import DimensionError, as_complex_vector, project_admissible, swap
from .hessian import FD_SECOND_STEP, HessianQuad, quad_from_matrix
from .wirtinger import JacobianPair, ScalarField, VectorField, WirtingerPair, cogradients, cogradients_fd

_WEIGHT_TOL = 1e-10

#: Residual count at which the curvature corrections go parallel.
_PARALLEL_MIN = 16


@dataclass(frozen=True, eq=False)
class CompoundJacobian:
    """The m x 2n model jacobian [d g / d z, d g / d conj(z)]."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.atleast_2d(np.asarray(self.matrix, dtype=complex))
        if mat.ndim != 2 or mat.shape[1] % 2:
            raise DimensionError(f"expected an m x 2n matrix, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1] // 2

    @property
    def jz(self) -> np.ndarray:
        return self.matrix[:, : self.n]

    @property
    def jzbar(self) -> np.ndarray:
        return self.matrix[:, self.n :]


@dataclass(frozen=True, eq=False)
class LsqProblem:
    """Data, model, and weight of a weighted least-squares fit.

    Parameters
    ----------
    g : VectorField
        Model map from C^n to C^m.
    y : ndarray
        Observations, length m.
    w : ndarray, optional
        Hermitian positive definite weight, m x m.  Identity when
        omitted.  Validated once here: the Hermitian residual must not
        exceed 1e-10 (relative) and a Cholesky factorization must
        succeed.
    """

    g: VectorField
    y: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.g, VectorField):
            raise TypeError("the model must be a VectorField")
        y = np.atleast_1d(np.asarray(self.y, dtype=complex))
        if y.shape != (self.g.m,):
            raise DimensionError(f"observations have shape {y.shape}, expected ({self.g.m},)")
        w = np.eye(self.g.m) if self.w is None else np.asarray(self.w, dtype=complex)
        if w.shape != (self.g.m, self.g.m):
            raise DimensionError(f"weight has shape {w.shape}, expected square of size {self.g.m}")
        scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
        if float(np.max(np.abs(w - w.conj().T))) > _WEIGHT_TOL * scale:
            raise ValueError("weight must be Hermitian")
        try:
            np.linalg.cholesky(w)
        except np.linalg.LinAlgError as exc:
            raise ValueError("weight must be positive definite") from exc
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)

    @property
    def m(self) -> int:
        return self.g.m


def residual(problem: LsqProblem, p) -> np.ndarray:
    """Data misfit e = y - g(z)."""
    return problem.y - problem.g(p)


def compound_jacobian(problem: LsqProblem, p) -> CompoundJacobian:
    """Stack the model's derivative blocks into the m x 2n matrix G."""
    pair = cogradients(problem.g, p)
    return CompoundJacobian(np.hstack([pair.jz, pair.jzbar]))


def loss(problem: LsqProblem, p) -> float:
    """Half the weighted squared residual; real by Hermitian symmetry of W."""
    e = residual(problem, p)
    return 0.5 * float(np.real(np.conj(e) @ problem.w @ e))


def loss_cogradient(problem: LsqProblem, p) -> tuple[np.ndarray, np.ndarray]:
    """First derivative of the loss in conjugate coordinates.

    Returns
    -------
    row : ndarray
        The 1 x 2n derivative row [d loss / d z, d loss / d conj(z)].
    grad : ndarray
        Its conjugate transpose as a length-2n vector, equal to
        (B + S conj(B)) / 2 with B = -G^H W e.  Admissible by
        construction.
    """
    e = residual(problem, p)
    gmat = compound_jacobian(problem, p).matrix
    b = -(gmat.conj().T @ (problem.w @ e))
    grad = 0.5 * (b + swap(np.conj(b)))
    return np.conj(grad), grad


def loss_pair(problem: LsqProblem, p) -> WirtingerPair:
    """The loss derivative row split into its z and conj(z) halves."""
    row, _ = loss_cogradient(problem, p)
    n = row.shape[0] // 2
    return WirtingerPair(row[:n], row[n:])


def gauss_newton_hessian(problem: LsqProblem, p) -> np.ndarray:
    """Admissible projection of the normal matrix G^H W G.

    Hermitian and positive semidefinite; positive definite whenever G
    has full column rank.  Agrees with the raw normal matrix on every
    admissible variation even though the raw matrix itself is not
    admissible.
    """
    gmat = compound_jacobian(problem, p).matrix
    return project_admissible(gmat.conj().T @ problem.w @ gmat)


def gauss_newton_blocks(problem: LsqProblem, p) -> tuple[np.ndarray, np.ndarray]:
    """Top blocks (U_zz, U_zbz) of the Gauss-Newton Hessian.

    The bottom row of blocks is determined by conjugation, so these two
    carry the whole matrix.
    """
    gn = gauss_newton_hessian(problem, p)
    n = gn.shape[0] // 2
    return gn[:n, :n], gn[:n, n:]


def _curvature_correction(problem: LsqProblem, z: np.ndarray, i: int, we_i: complex, step: float) -> np.ndarray:
    """Projected second-derivative correction of residual component i."""
    n = z.shape[0]

    def conj_jac_row(w: np.ndarray) -> np.ndarray:
        pair = cogradients(problem.g, w)
        return np.conj(np.concatenate([pair.jz[i], pair.jzbar[i]]))

    row_field = VectorField(2 * n, conj_jac_row, name=f"component {i} jacobian row")
    jac = cogradients_fd(row_field, z, step=step)
    a_i = np.hstack([jac.jz, jac.jzbar])
    return project_admissible(a_i * we_i)


def newton_hessian(problem: LsqProblem, p, step: float | None = None) -> np.ndarray:
    """Full 2n x 2n curvature of the loss in conjugate coordinates.

    Subtracts one projected curvature correction per residual component
    from the Gauss-Newton Hessian.  Each correction differences the
    component's conjugated jacobian row once (relative step eps**(1/4)),
    so models with analytic jacobians that are linear in (z, conj(z))
    get exactly zero correction.  The estimate is re-Hermitized and
    re-projected before returning, so its block invariants hold exactly.

    Component corrections are independent; with many components they
    are computed on a thread pool sized by ``CRCALC_THREADS``, with a
    fixed summation order either way.
    """
    z = as_complex_vector(p)
    h = FD_SECOND_STEP if step is None else float(step)
    gn = gauss_newton_hessian(problem, z)
    we = problem.w @ residual(problem, z)

    def one(i: int) -> np.ndarray:
        return _curvature_correction(problem, z, i, complex(we[i]), h)

    workers = thread_count()
    if problem.m >= _PARALLEL_MIN and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            corrections = list(pool.map(one, range(problem.m)))
    else:
        corrections = [one(i) for i in range(problem.m)]

    total = gn
    for corr in corrections:
        total = total - corr
    total = 0.5 * (total + total.conj().T)
    return project_admissible(total)


def newton_quad(problem: LsqProblem, p, step: float | None = None) -> HessianQuad:
    """The Newton Hessian sliced into curvature blocks."""
    return quad_from_matrix(newton_hessian(problem, p, step=step))


def loss_field(problem: LsqProblem, name: str | None = None) -> ScalarField:
    """Wrap the weighted least-squares loss as a scalar field.

    The field carries the analytic derivative row and the Newton
    curvature blocks, so the generic first- and second-order machinery
    applies to it unchanged.
    """
    return ScalarField(
        fn=lambda z: loss(problem, z),
        cogradient_fn=lambda z: loss_pair(problem, z),
        hessian_fn=lambda z: newton_quad(problem, z),
        name=name or "least-squares loss",
    )
