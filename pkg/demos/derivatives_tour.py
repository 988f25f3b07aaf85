"""
Derivatives without holomorphy
==============================

Real-valued losses of a complex variable are never holomorphic, yet
they are smooth functions of the underlying real coordinates.  Keeping
both derivative rows df/dz and df/dconj(z) makes the usual calculus go
through: linearization, chain rule, steepest ascent.
"""

import numpy as np

from crcalc import (
    ScalarField,
    VectorField,
    cogradients,
    cogradients_fd,
    compose,
    first_order_predict,
    gradient,
    is_holomorphic,
    stationarity_residual,
)

np.set_printoptions(precision=6, suppress=True)

# |z|^2 depends on both z and conj(z): its rows are (conj z, z).
mod2 = ScalarField(lambda z: float(np.real(np.conj(z) @ z)), name="|z|^2")
z = np.array([1.0 + 2.0j])
pair = cogradients(mod2, z)
print("df/dz      =", pair.dz)
print("df/dconj z =", pair.dzbar)
print("rows are conjugates of each other:", pair.conjugation_residual())
print()

# Differencing and analytic rows agree.  Fields may carry analytic
# derivatives; without them central differences kick in automatically.
fd = cogradients_fd(mod2, z)
print("differenced df/dz =", fd.dz)
print()

# The holomorphy probe samples the conjugate block on a small ball.
square = VectorField(1, lambda w: w**2, name="z^2")
conj_map = VectorField(1, lambda w: np.conj(w), name="conj z")
print("z^2 holomorphic:  ", is_holomorphic(square, center=[0.3 + 0.3j]).holomorphic)
print("conj holomorphic: ", is_holomorphic(conj_map, center=[0.3 + 0.3j]).holomorphic)
print()

# First-order prediction of a real loss needs only the dz row:
# f(z + d) is approximately f(z) + 2 Re{(df/dz) d}.
delta = np.array([0.01 - 0.02j])
print("predicted:", first_order_predict(mod2, z, delta))
print("actual:   ", mod2(z + delta))
print()

# Steepest ascent under the identity metric is the conjugated row.
print("gradient at z:", gradient(mod2, z))
print("stationarity residual at 0:", stationarity_residual(mod2, np.zeros(1, complex)))
print()

# Chain rule: composing two maps chains both blocks.  Differencing the
# composite agrees with the chained analytic blocks.
inner = VectorField(1, lambda w: w + 0.5 * np.conj(w), name="mix")
outer = VectorField(1, lambda w: w**2, name="square")
combo = compose(outer, inner)
combo_fd = cogradients_fd(combo, z)
print("composite jz by differencing:   ", combo_fd.jz.ravel())
print("composite jzbar by differencing:", combo_fd.jzbar.ravel())
