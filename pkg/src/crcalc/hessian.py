"""Second-order structure of real-valued fields of a complex vector.

The curvature of a real field splits into four n x n blocks, the
derivatives of the conjugated first-derivative rows with respect to z
and conj(z).  Writing A = Hzz, B = Hzbz, C = Hzzb, D = Hzbzb:

    A is Hermitian, B is symmetric, C = conj(B), D = conj(A).

Three equivalent 2n x 2n assemblies are used downstream: the Hermitian
form [[A, B], [C, D]] in conjugate coordinates, its row-swapped
symmetric sibling, and the real-coordinate Hessian, related by the
congruence with the coordinate-change matrix.  All three encode the
same quadratic form, so second-order predictions agree across them to
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coords import DimensionError, as_complex_vector, matrix_residual, swap_rows
from .errors import RelationViolation, SymmetryViolation
from .wirtinger import ScalarField, VectorField, cogradients, cogradients_fd

#: Relative step for differencing first-derivative rows a second time.
FD_SECOND_STEP = float(np.finfo(float).eps) ** 0.25

#: Pre-symmetrization residual allowance for differenced blocks.
SYM_TOL_FD = 1e-4

#: Pre-symmetrization residual allowance for analytic blocks.
SYM_TOL_ANALYTIC = 1e-8

_IMAG_TOL = 1e-10
_INVARIANT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class HessianQuad:
    """The four curvature blocks of a real field, already symmetrized.

    Attributes
    ----------
    hzz, hzbz, hzzb, hzbzb : ndarray
        Blocks d/dz (df/dz)^H, d/dconj (df/dz)^H, d/dz (df/dconj)^H,
        and d/dconj (df/dconj)^H, each n x n.
    presym_residual : float
        Infinity-norm distance between the raw blocks and the
        symmetrized ones, recorded by :func:`hessian_quad`.
    """

    hzz: np.ndarray
    hzbz: np.ndarray
    hzzb: np.ndarray
    hzbzb: np.ndarray
    presym_residual: float = 0.0

    def __post_init__(self):
        blocks = []
        for name in ("hzz", "hzbz", "hzzb", "hzbzb"):
            blk = np.atleast_2d(np.asarray(getattr(self, name), dtype=complex))
            blocks.append(blk)
            object.__setattr__(self, name, blk)
        shape = blocks[0].shape
        if shape[0] != shape[1] or any(b.shape != shape for b in blocks):
            raise DimensionError("curvature blocks must be square and share a shape")

    @property
    def n(self) -> int:
        return self.hzz.shape[0]

    def invariant_residual(self) -> float:
        """Worst violation of the four block constraints, infinity norm."""
        return max(
            float(np.max(np.abs(self.hzz - self.hzz.conj().T))),
            float(np.max(np.abs(self.hzbz - self.hzbz.T))),
            float(np.max(np.abs(self.hzzb - np.conj(self.hzbz)))),
            float(np.max(np.abs(self.hzbzb - np.conj(self.hzz)))),
        )


@dataclass(frozen=True, eq=False)
class AssembledHessians:
    """Dense 2n x 2n curvature matrices in the three representations.

    ``hc_complex`` is Hermitian, ``hc_real`` (its row-swapped form) is
    complex symmetric, and ``hrr`` is the real symmetric Hessian in
    stacked real coordinates.  Eigenvalues of ``hrr`` are exactly twice
    those of ``hc_complex``; the two share singular values with
    ``hc_real``.
    """

    hc_complex: np.ndarray
    hc_real: np.ndarray
    hrr: np.ndarray

    @property
    def n(self) -> int:
        return self.hc_complex.shape[0] // 2


def _symmetrize(a, b, c, d):
    hzz = 0.25 * (a + a.conj().T + np.conj(d) + d.T)
    hzbz = 0.25 * (b + b.T + np.conj(c) + c.conj().T)
    hzzb = np.conj(hzbz)
    hzbzb = np.conj(hzz)
    resid = max(
        float(np.max(np.abs(a - hzz))),
        float(np.max(np.abs(b - hzbz))),
        float(np.max(np.abs(c - hzzb))),
        float(np.max(np.abs(d - hzbzb))),
    )
    return hzz, hzbz, hzzb, hzbzb, resid


def _finish_quad(a, b, c, d, tol: float, context: str) -> HessianQuad:
    hzz, hzbz, hzzb, hzbzb, resid = _symmetrize(a, b, c, d)
    scale = max(
        1.0,
        float(np.max(np.abs(hzz), initial=0.0)),
        float(np.max(np.abs(hzbz), initial=0.0)),
    )
    if resid > tol * scale:
        raise SymmetryViolation(
            f"{context}: raw curvature blocks violate symmetry, "
            f"residual {resid:.3e} exceeds {tol * scale:.3e}"
        )
    return HessianQuad(hzz, hzbz, hzzb, hzbzb, presym_residual=resid)


def hessian_quad(field: ScalarField, p, step: float | None = None) -> HessianQuad:
    """Curvature blocks of a real field at a point.

    Uses the field's analytic second derivatives when present
    (symmetry enforced at 1e-8 relative).  Otherwise each conjugated
    first-derivative row, analytic or differenced, is differenced once
    more with a relative step of eps**(1/4), and the blocks are
    symmetrized with the looser 1e-4 allowance.

    Raises
    ------
    SymmetryViolation
        If the raw blocks sit farther from the symmetrized ones than
        the applicable tolerance, which signals inconsistent analytic
        derivatives or a rough field.
    """
    z = as_complex_vector(p)
    n = z.shape[0]
    if field.hessian_fn is not None:
        quad = field.hessian_fn(z)
        if not isinstance(quad, HessianQuad):
            quad = HessianQuad(*quad)
        return _finish_quad(
            quad.hzz, quad.hzbz, quad.hzzb, quad.hzbzb, SYM_TOL_ANALYTIC, field.name
        )
    base = FD_SECOND_STEP if step is None else float(step)
    if base <= 0.0:
        raise ValueError("step must be positive")

    dz_conj = VectorField(n, lambda w: np.conj(cogradients(field, w).dz), name=f"d({field.name})/dz^H")
    dzbar_conj = VectorField(
        n, lambda w: np.conj(cogradients(field, w).dzbar), name=f"d({field.name})/dconj^H"
    )
    ju = cogradients_fd(dz_conj, z, step=base)
    jv = cogradients_fd(dzbar_conj, z, step=base)
    return _finish_quad(ju.jz, ju.jzbar, jv.jz, jv.jzbar, SYM_TOL_FD, field.name)


def quad_from_matrix(hc: np.ndarray, tol: float = _INVARIANT_TOL) -> HessianQuad:
    """Slice a Hermitian admissible 2n x 2n matrix into curvature blocks."""
    hc = np.asarray(hc, dtype=complex)
    if hc.ndim != 2 or hc.shape[0] != hc.shape[1] or hc.shape[0] % 2:
        raise DimensionError(f"expected an even square matrix, got shape {hc.shape}")
    scale = max(1.0, float(np.max(np.abs(hc), initial=0.0)))
    herm = float(np.max(np.abs(hc - hc.conj().T)))
    adm = matrix_residual(hc)
    if herm > tol * scale or adm > tol * scale:
        raise RelationViolation(
            f"matrix is not a curvature assembly: hermitian residual {herm:.3e}, "
            f"pairing residual {adm:.3e}"
        )
    n = hc.shape[0] // 2
    return HessianQuad(hc[:n, :n], hc[:n, n:], hc[n:, :n], hc[n:, n:])


def assemble(quad: HessianQuad) -> AssembledHessians:
    """Build the three 2n x 2n representations from curvature blocks.

    The real-coordinate Hessian is produced by the congruence with the
    coordinate-change matrix, applied blockwise; its imaginary residue
    must stay below 1e-10 (relative) before truncation.

    Raises
    ------
    RelationViolation
        If the blocks violate their invariants, or the real-coordinate
        form fails to come out real.
    """
    resid = quad.invariant_residual()
    scale = max(
        1.0,
        float(np.max(np.abs(quad.hzz), initial=0.0)),
        float(np.max(np.abs(quad.hzbz), initial=0.0)),
    )
    if resid > _INVARIANT_TOL * scale:
        raise RelationViolation(
            f"curvature blocks violate their invariants, residual {resid:.3e}"
        )
    a, b, c, d = quad.hzz, quad.hzbz, quad.hzzb, quad.hzbzb
    hc = np.block([[a, b], [c, d]])
    hc_real = swap_rows(hc)
    hrr_c = np.block(
        [
            [a + b + c + d, 1j * (a - b + c - d)],
            [1j * (c + d - a - b), a - b - c + d],
        ]
    )
    imag = float(np.max(np.abs(hrr_c.imag)))
    if imag > _IMAG_TOL * max(1.0, float(np.max(np.abs(hrr_c)))):
        raise RelationViolation(
            f"real-coordinate Hessian has imaginary residue {imag:.3e}"
        )
    return AssembledHessians(hc_complex=hc, hc_real=hc_real, hrr=hrr_c.real)


def complex_from_real(hrr: np.ndarray) -> np.ndarray:
    """Recover the Hermitian conjugate-coordinate form from a real Hessian.

    Applies the inverse congruence (a quarter of the sandwich with the
    coordinate-change matrix) blockwise.  The input must be real
    symmetric of even dimension.
    """
    hrr = np.asarray(hrr, dtype=float)
    if hrr.ndim != 2 or hrr.shape[0] != hrr.shape[1] or hrr.shape[0] % 2:
        raise DimensionError(f"expected an even square matrix, got shape {hrr.shape}")
    n = hrr.shape[0] // 2
    p = hrr[:n, :n]
    q = hrr[:n, n:]
    qt = hrr[n:, :n]
    r = hrr[n:, n:]
    hzz = 0.25 * (p + r + 1j * (qt - q))
    hzbz = 0.25 * (p - r + 1j * (qt + q))
    hzzb = 0.25 * (p - r - 1j * (qt + q))
    hzbzb = 0.25 * (p + r - 1j * (qt - q))
    return np.block([[hzz, hzbz], [hzzb, hzbzb]])


_REPRESENTATIONS = ("z", "c-complex", "c-real", "r")


def second_order_predict(field: ScalarField, p, delta_z, representation: str = "z") -> float:
    """Second-order value estimate of a real field after a step.

    The four representations carry the same expansion:

    - ``"z"``: value + 2 Re{(df/dz) dz} + Re{dz^H A dz + dz^H B conj(dz)}
    - ``"c-complex"``: Hermitian quadratic form in (dz, conj(dz))
    - ``"c-real"``: transposed form against the row-swapped matrix
    - ``"r"``: real quadratic form in (Re dz, Im dz)

    Results agree to rounding, which is exercised by the test suite.
    """
    if representation not in _REPRESENTATIONS:
        raise ValueError(f"representation must be one of {_REPRESENTATIONS}")
    z = as_complex_vector(p)
    dz = as_complex_vector(delta_z)
    if dz.shape != z.shape:
        raise DimensionError("step dimension does not match the point")
    value = field(z)
    pair = cogradients(field, z)
    quad = hessian_quad(field, z)

    if representation == "z":
        lin = 2.0 * float(np.real(pair.dz @ dz))
        second = float(
            np.real(np.conj(dz) @ quad.hzz @ dz + np.conj(dz) @ quad.hzbz @ np.conj(dz))
        )
        return value + lin + second

    assembled = assemble(quad)
    dc = np.concatenate([dz, np.conj(dz)])
    row_c = np.concatenate([pair.dz, pair.dzbar])
    lin = float(np.real(row_c @ dc))
    if representation == "c-complex":
        second = 0.5 * float(np.real(np.conj(dc) @ assembled.hc_complex @ dc))
        return value + lin + second
    if representation == "c-real":
        second = 0.5 * float(np.real(dc @ assembled.hc_real @ dc))
        return value + lin + second
    dr = np.concatenate([dz.real, dz.imag])
    row_r = np.concatenate([pair.dz + pair.dzbar, 1j * (pair.dz - pair.dzbar)])
    lin_r = float(np.real(row_r @ dr))
    second = 0.5 * float(dr @ assembled.hrr @ dr)
    return value + lin_r + second
