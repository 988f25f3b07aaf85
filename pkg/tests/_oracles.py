"""Independent oracles shared by the test modules.

Everything here is deliberately built from first principles with plain
numpy so library results can be checked against code that shares no
implementation with the package: dense structure matrices from their
definitions, finite differences taken directly in stacked real
coordinates, and random field families whose derivatives were worked
out by hand and frozen in the builders below.
"""

from __future__ import annotations

import numpy as np

from crcalc.hessian import HessianQuad
from crcalc.wirtinger import JacobianPair, ScalarField, VectorField, WirtingerPair


def dense_j(n: int) -> np.ndarray:
    """[[I, iI], [I, -iI]] assembled entry by entry."""
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        out[i, i] = 1.0
        out[i, n + i] = 1j
        out[n + i, i] = 1.0
        out[n + i, n + i] = -1j
    return out


def dense_s(n: int) -> np.ndarray:
    out = np.zeros((2 * n, 2 * n))
    for i in range(n):
        out[i, n + i] = 1.0
        out[n + i, i] = 1.0
    return out


def dense_c(n: int) -> np.ndarray:
    out = np.zeros((2 * n, 2 * n))
    for i in range(n):
        out[i, i] = 1.0
        out[n + i, n + i] = -1.0
    return out


def z_to_r(z: np.ndarray) -> np.ndarray:
    return np.concatenate([np.real(z), np.imag(z)])


def r_to_z(r: np.ndarray) -> np.ndarray:
    n = r.shape[0] // 2
    return r[:n] + 1j * r[n:]


def real_fd_gradient(f_of_r, r: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Plain central differences of a real function of real coordinates."""
    r = np.asarray(r, dtype=float)
    out = np.empty(r.shape[0])
    for i in range(r.shape[0]):
        step = np.zeros_like(r)
        step[i] = h * max(1.0, abs(r[i]))
        out[i] = (f_of_r(r + step) - f_of_r(r - step)) / (2.0 * step[i])
    return out


def real_fd_hessian(f_of_r, r: np.ndarray, h: float = 2e-4) -> np.ndarray:
    """Symmetric second differences of a real function of real coordinates."""
    r = np.asarray(r, dtype=float)
    dim = r.shape[0]
    out = np.empty((dim, dim))
    steps = [h * max(1.0, abs(r[i])) for i in range(dim)]
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = steps[i]
        for j in range(i, dim):
            ej = np.zeros(dim)
            ej[j] = steps[j]
            val = (
                f_of_r(r + ei + ej)
                - f_of_r(r + ei - ej)
                - f_of_r(r - ei + ej)
                + f_of_r(r - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
            out[i, j] = val
            out[j, i] = val
    return out


def random_poly_vector_field(rng: np.random.Generator, n: int, m: int, scale: float = 0.5, holomorphic: bool = False) -> VectorField:
    """Random map with hand-derived analytic derivative blocks.

    Component i is

        sum_j  A[i,j] z_j + B[i,j] conj(z_j) + C[i,j] z_j^2
             + D[i,j] conj(z_j)^2 + E[i,j] z_j conj(z_j)

    so d/dz_j = A + 2 C z_j + E conj(z_j) and
    d/dconj(z_j) = B + 2 D conj(z_j) + E z_j.  With ``holomorphic``
    the B, D, E coefficients are zeroed.
    """

    def draw():
        return scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))

    a, b, c, d, e = draw(), draw(), draw(), draw(), draw()
    if holomorphic:
        b = np.zeros_like(b)
        d = np.zeros_like(d)
        e = np.zeros_like(e)

    def fn(z):
        zc = np.conj(z)
        return a @ z + b @ zc + c @ z**2 + d @ zc**2 + e @ (z * zc)

    def jac(z):
        zc = np.conj(z)
        jz = a + 2.0 * c * z[None, :] + e * zc[None, :]
        jzbar = b + 2.0 * d * zc[None, :] + e * z[None, :]
        return JacobianPair(jz, jzbar)

    return VectorField(m, fn, jacobian_fn=jac, name="random polynomial map")


def random_quadratic_loss(rng: np.random.Generator, n: int, scale: float = 0.5, definite: bool = False):
    """Random real quadratic with frozen analytic derivatives.

    The loss is

        e0 + Re{a^H z} + z^H P z + Re{z^T Q z}

    with P Hermitian and Q symmetric, giving the hand-derived rows

        df/dz = a^H / 2 + z^H P + z^T Q

    and constant curvature blocks (P, conj(Q), Q, conj(P)).  With
    ``definite`` a multiple of the identity is added to P so the full
    curvature is positive definite.

    Returns
    -------
    field : ScalarField
    quad : HessianQuad
        The frozen curvature blocks.
    """
    a = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    p_raw = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    p = 0.5 * (p_raw + p_raw.conj().T)
    q_raw = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    q = 0.5 * (q_raw + q_raw.T)
    e0 = float(rng.standard_normal())
    if definite:
        shift = float(np.linalg.norm(p) + np.linalg.norm(q)) + 1.0
        p = p + shift * np.eye(n)

    def fn(z):
        zc = np.conj(z)
        return (
            e0
            + float(np.real(np.conj(a) @ z))
            + float(np.real(zc @ p @ z))
            + float(np.real(z @ q @ z))
        )

    def cograd(z):
        dz = 0.5 * np.conj(a) + np.conj(z) @ p + z @ q
        return WirtingerPair(dz, np.conj(dz))

    def hess(z):
        return HessianQuad(p, np.conj(q), q, np.conj(p))

    field = ScalarField(fn, cogradient_fn=cograd, hessian_fn=hess, name="random quadratic loss")
    return field, HessianQuad(p, np.conj(q), q, np.conj(p))


def quartic_norm_field(with_analytic: bool = False) -> ScalarField:
    """The loss (z^H z)^2 with hand-derived derivatives.

    df/dz = 2 (z^H z) z^H, curvature blocks
    Hzz = 2 ||z||^2 I + 2 z z^H and Hzbz = 2 z z^T.
    """
    def fn(z):
        return float(np.real(np.conj(z) @ z)) ** 2

    cograd = None
    hess = None
    if with_analytic:
        def cograd(z):
            dz = 2.0 * float(np.real(np.conj(z) @ z)) * np.conj(z)
            return WirtingerPair(dz, np.conj(dz))

        def hess(z):
            nrm2 = float(np.real(np.conj(z) @ z))
            eye = np.eye(z.shape[0])
            hzz = 2.0 * nrm2 * eye + 2.0 * np.outer(z, np.conj(z))
            hzbz = 2.0 * np.outer(z, z)
            return HessianQuad(hzz, hzbz, np.conj(hzbz), np.conj(hzz))

    return ScalarField(fn, cogradient_fn=cograd, hessian_fn=hess, name="squared norm squared")


def random_complex_vector(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def random_complex_matrix(rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
