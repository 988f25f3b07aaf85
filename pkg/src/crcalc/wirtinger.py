"""First-order calculus for functions of a complex vector.

Derivatives here are taken with respect to z and conj(z) as if they
were independent variables.  For a map f the two row blocks

    df/dz    = (df/dx - i df/dy) / 2
    df/dconj = (df/dx + i df/dy) / 2

capture everything the real derivative knows; f is holomorphic exactly
when the second block vanishes.  Real-valued losses are never
holomorphic, but their two blocks are conjugates of each other, so a
single row determines the whole first-order behavior:

    f(z + dz) = f(z) + 2 Re{ (df/dz) dz } + o(dz).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coords import DimensionError, MetricTensor, as_complex_vector
from .errors import ConjugationMismatch, NonFiniteEvaluation, SingularMatrix

#: Relative step for first-derivative central differences.
FD_FIRST_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)

#: Conjugate-pairing tolerance for analytic derivatives of real fields.
CONJ_TOL_ANALYTIC = 1e-8

#: Conjugate-pairing tolerance when derivatives come from differencing.
CONJ_TOL_FD = 1e-5

#: Holomorphy residual threshold with analytic derivative blocks.
HOLO_TOL_ANALYTIC = 1e-9

#: Holomorphy residual threshold with differenced derivative blocks.
HOLO_TOL_FD = 1e-5

_REAL_DUST = 1e-10


@dataclass(frozen=True, eq=False)
class WirtingerPair:
    """First-derivative rows of a real scalar field.

    Attributes
    ----------
    dz : ndarray
        Row d f / d z, length n.
    dzbar : ndarray
        Row d f / d conj(z), length n.  Equals conj(dz) for any
        real-valued field.
    """

    dz: np.ndarray
    dzbar: np.ndarray

    def __post_init__(self):
        dz = np.atleast_1d(np.asarray(self.dz, dtype=complex))
        dzbar = np.atleast_1d(np.asarray(self.dzbar, dtype=complex))
        if dz.shape != dzbar.shape or dz.ndim != 1:
            raise DimensionError("derivative rows must be vectors of equal length")
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "dzbar", dzbar)

    @property
    def n(self) -> int:
        return self.dz.shape[0]

    def conjugation_residual(self) -> float:
        """Infinity-norm violation of dzbar = conj(dz)."""
        return float(np.max(np.abs(np.conj(self.dz) - self.dzbar), initial=0.0))


@dataclass(frozen=True, eq=False)
class JacobianPair:
    """Derivative blocks of a vector map, each of shape m x n.

    ``jz`` holds d f / d z and ``jzbar`` holds d f / d conj(z).  The map
    is holomorphic on a region exactly when jzbar vanishes there.
    """

    jz: np.ndarray
    jzbar: np.ndarray

    def __post_init__(self):
        jz = np.atleast_2d(np.asarray(self.jz, dtype=complex))
        jzbar = np.atleast_2d(np.asarray(self.jzbar, dtype=complex))
        if jz.shape != jzbar.shape:
            raise DimensionError("jacobian blocks must share a shape")
        object.__setattr__(self, "jz", jz)
        object.__setattr__(self, "jzbar", jzbar)

    @property
    def shape(self) -> tuple[int, int]:
        return self.jz.shape


class ScalarField:
    """A real-valued function of a complex vector.

    Parameters
    ----------
    fn : callable
        Maps a 1-D complex array to a real scalar.  A complex return
        with imaginary dust below 1e-10 (relative) is truncated;
        anything larger raises ValueError, since the calculus in this
        package assumes real-valued losses.
    cogradient_fn : callable, optional
        Maps a point to a :class:`WirtingerPair`.  Used instead of
        differencing when present.
    hessian_fn : callable, optional
        Maps a point to second-derivative blocks (consumed by the
        curvature module).
    name : str, optional
        Label for reports and traces.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], float],
        cogradient_fn: Callable[[np.ndarray], WirtingerPair] | None = None,
        hessian_fn=None,
        name: str = "scalar field",
    ):
        self.fn = fn
        self.cogradient_fn = cogradient_fn
        self.hessian_fn = hessian_fn
        self.name = name

    def __call__(self, p) -> float:
        z = as_complex_vector(p)
        value = self.fn(z)
        value = complex(value)
        if not (np.isfinite(value.real) and np.isfinite(value.imag)):
            raise NonFiniteEvaluation(f"{self.name} returned a non-finite value at {z!r}")
        if abs(value.imag) > _REAL_DUST * max(1.0, abs(value.real)):
            raise ValueError(f"{self.name} must be real-valued, got {value!r}")
        return float(value.real)


class VectorField:
    """A map from C^n to C^m.

    Parameters
    ----------
    m : int
        Output dimension.
    fn : callable
        Maps a 1-D complex array to a length-m complex array.
    jacobian_fn : callable, optional
        Maps a point to a :class:`JacobianPair`.  Used instead of
        differencing when present.
    name : str, optional
        Label for reports and traces.
    """

    def __init__(
        self,
        m: int,
        fn: Callable[[np.ndarray], np.ndarray],
        jacobian_fn: Callable[[np.ndarray], JacobianPair] | None = None,
        name: str = "vector field",
    ):
        self.m = int(m)
        self.fn = fn
        self.jacobian_fn = jacobian_fn
        self.name = name

    def __call__(self, p) -> np.ndarray:
        z = as_complex_vector(p)
        value = np.atleast_1d(np.asarray(self.fn(z), dtype=complex))
        if value.shape != (self.m,):
            raise DimensionError(
                f"{self.name} returned shape {value.shape}, expected ({self.m},)"
            )
        if not np.all(np.isfinite(value)):
            raise NonFiniteEvaluation(f"{self.name} returned non-finite values at {z!r}")
        return value


def _fd_blocks(call: Callable[[np.ndarray], np.ndarray], z: np.ndarray, base: float):
    """Central-difference jz and jzbar of a vector-valued callable."""
    n = z.shape[0]
    m = call(z).shape[0]
    jz = np.empty((m, n), dtype=complex)
    jzbar = np.empty((m, n), dtype=complex)
    for i in range(n):
        hx = base * max(1.0, abs(z[i].real))
        hy = base * max(1.0, abs(z[i].imag))
        ex = np.zeros(n, dtype=complex)
        ex[i] = hx
        ey = np.zeros(n, dtype=complex)
        ey[i] = 1j * hy
        dfdx = (call(z + ex) - call(z - ex)) / (2.0 * hx)
        dfdy = (call(z + ey) - call(z - ey)) / (2.0 * hy)
        jz[:, i] = 0.5 * (dfdx - 1j * dfdy)
        jzbar[:, i] = 0.5 * (dfdx + 1j * dfdy)
    return jz, jzbar


def cogradients_fd(field, p, step: float | None = None):
    """Derivative blocks by central differences in each real coordinate.

    The per-coordinate step is ``h * max(1, |coordinate|)`` where ``h``
    defaults to eps**(1/3).  Returns a :class:`WirtingerPair` for a
    :class:`ScalarField` and a :class:`JacobianPair` for a
    :class:`VectorField`.

    Raises
    ------
    NonFiniteEvaluation
        If any probe evaluation is non-finite.
    ValueError
        If ``step`` is not positive.
    """
    base = FD_FIRST_STEP if step is None else float(step)
    if base <= 0.0:
        raise ValueError("step must be positive")
    z = as_complex_vector(p)
    if isinstance(field, ScalarField):
        call = lambda w: np.array([field(w)])
        jz, jzbar = _fd_blocks(call, z, base)
        return WirtingerPair(jz[0], jzbar[0])
    if isinstance(field, VectorField):
        jz, jzbar = _fd_blocks(field, z, base)
        return JacobianPair(jz, jzbar)
    raise TypeError(f"expected a ScalarField or VectorField, got {type(field).__name__}")


def cogradients(field, p):
    """Analytic derivative blocks when available, differenced otherwise.

    For a :class:`ScalarField` the conjugate pairing dzbar = conj(dz) is
    checked and :class:`ConjugationMismatch` raised on failure, with the
    tighter tolerance applied to analytic derivatives.
    """
    z = as_complex_vector(p)
    if isinstance(field, ScalarField):
        if field.cogradient_fn is not None:
            pair = field.cogradient_fn(z)
            if not isinstance(pair, WirtingerPair):
                pair = WirtingerPair(*pair)
            tol = CONJ_TOL_ANALYTIC
        else:
            pair = cogradients_fd(field, z)
            tol = CONJ_TOL_FD
        scale = max(1.0, float(np.max(np.abs(pair.dz), initial=0.0)))
        resid = pair.conjugation_residual()
        if resid > tol * scale:
            raise ConjugationMismatch(
                f"{field.name}: derivative rows of a real field must be conjugate, "
                f"residual {resid:.3e} exceeds {tol * scale:.3e}"
            )
        return pair
    if isinstance(field, VectorField):
        if field.jacobian_fn is not None:
            pair = field.jacobian_fn(z)
            if not isinstance(pair, JacobianPair):
                pair = JacobianPair(*pair)
            return pair
        return cogradients_fd(field, z)
    raise TypeError(f"expected a ScalarField or VectorField, got {type(field).__name__}")


@dataclass(frozen=True)
class HolomorphyReport:
    """Outcome of a holomorphy probe over a sample set."""

    holomorphic: bool
    max_residual: float
    tol: float
    points: int


def is_holomorphic(
    field: VectorField,
    points=None,
    *,
    center=None,
    samples: int = 16,
    tol: float | None = None,
    seed: int = 0,
) -> HolomorphyReport:
    """Probe whether the conjugate derivative block vanishes on a region.

    Either pass an explicit non-empty iterable of ``points`` or a
    ``center``; in the latter case the point set is the center plus
    ``samples`` draws from a complex Gaussian ball of radius 1 around
    it, generated deterministically from ``seed``.  The default
    threshold is 1e-9 when the field carries analytic jacobians and
    1e-5 under differencing.
    """
    if not isinstance(field, VectorField):
        raise TypeError("holomorphy is a property of vector maps")
    if points is None:
        if center is None:
            raise ValueError("provide points or a center")
        z0 = as_complex_vector(center)
        rng = np.random.default_rng(seed)
        pts = [z0]
        for _ in range(samples):
            g = rng.standard_normal(z0.shape[0]) + 1j * rng.standard_normal(z0.shape[0])
            g /= np.sqrt(2.0)
            norm = float(np.linalg.norm(g))
            pts.append(z0 + g / max(1.0, norm))
    else:
        pts = [as_complex_vector(q) for q in points]
        if not pts:
            raise ValueError("the sample set must be non-empty")
    if tol is None:
        tol = HOLO_TOL_ANALYTIC if field.jacobian_fn is not None else HOLO_TOL_FD
    worst = 0.0
    for q in pts:
        pair = cogradients(field, q)
        worst = max(worst, float(np.max(np.abs(pair.jzbar), initial=0.0)))
    return HolomorphyReport(holomorphic=worst <= tol, max_residual=worst, tol=tol, points=len(pts))


def gradient(field: ScalarField, p, metric: MetricTensor | None = None) -> np.ndarray:
    """Steepest-ascent direction of a real field under a metric.

    Solves omega @ g = (df/dz)^H; with the identity metric this is just
    the conjugated derivative row.  The returned direction satisfies the
    defining property that df along v is maximized over unit v at
    v parallel to g.
    """
    pair = cogradients(field, p)
    rhs = np.conj(pair.dz)
    if metric is None:
        return rhs
    omega = metric.omega if isinstance(metric, MetricTensor) else MetricTensor(metric).omega
    if omega.shape[0] != rhs.shape[0]:
        raise DimensionError("metric dimension does not match the field")
    try:
        return np.linalg.solve(omega, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("metric is singular") from exc


def stationarity_residual(field: ScalarField, p) -> float:
    """Infinity norm of df/dz; zero at stationary points.

    Because dzbar = conj(dz) for a real field, either row vanishing
    implies the other does.
    """
    pair = cogradients(field, p)
    return float(np.max(np.abs(pair.dz), initial=0.0))


def first_order_predict(field: ScalarField, p, delta_z) -> float:
    """First-order value estimate f(p) + 2 Re{(df/dz) dz}."""
    z = as_complex_vector(p)
    dz = as_complex_vector(delta_z)
    pair = cogradients(field, z)
    return field(z) + 2.0 * float(np.real(pair.dz @ dz))


def differential(pair: JacobianPair, delta_z) -> np.ndarray:
    """First-order change of a vector map: jz @ dz + jzbar @ conj(dz)."""
    dz = as_complex_vector(delta_z)
    return pair.jz @ dz + pair.jzbar @ np.conj(dz)


def conjugate_field(field: VectorField) -> VectorField:
    """The pointwise conjugate map, with derivative blocks exchanged.

    If f has blocks (jz, jzbar) then conj(f) has blocks
    (conj(jzbar), conj(jz)).
    """
    jac = None
    if field.jacobian_fn is not None:
        def jac(z, _inner=field.jacobian_fn):
            pair = _inner(z)
            return JacobianPair(np.conj(pair.jzbar), np.conj(pair.jz))

    return VectorField(
        m=field.m,
        fn=lambda z: np.conj(field(z)),
        jacobian_fn=jac,
        name=f"conj({field.name})",
    )


def compose(outer: VectorField, inner: VectorField) -> VectorField:
    """The composition outer(inner(z)) with chained derivative blocks.

    When both maps carry analytic jacobians the composite gets

        jz    = Jo jz_i + Jo_bar conj(jzbar_i)
        jzbar = Jo jzbar_i + Jo_bar conj(jz_i)

    with Jo, Jo_bar evaluated at inner(z); otherwise the composite falls
    back to differencing.
    """
    jac = None
    if outer.jacobian_fn is not None and inner.jacobian_fn is not None:
        def jac(z):
            gi = cogradients(inner, z)
            go = cogradients(outer, inner(z))
            return JacobianPair(
                go.jz @ gi.jz + go.jzbar @ np.conj(gi.jzbar),
                go.jz @ gi.jzbar + go.jzbar @ np.conj(gi.jz),
            )

    return VectorField(
        m=outer.m,
        fn=lambda z: outer(inner(z)),
        jacobian_fn=jac,
        name=f"{outer.name} after {inner.name}",
    )
