"""
Coordinate stacks and the structure matrices
============================================

A point of C^n can be carried as z itself, as stacked real coordinates
r = (x, y), or as the conjugate stack c = (z, conj z).  The three views
are linked by a fixed matrix J, and two companions S and C encode
conjugation and the sign split.  This script walks through the algebra
at n = 2.
"""

import numpy as np

from crcalc import (
    ComplexPoint,
    StructureMatrices,
    from_conjugate,
    is_admissible_matrix,
    project_admissible,
    swap,
    to_conjugate,
    to_real,
    verify_transform_laws,
)

np.set_printoptions(precision=4, suppress=True)

# A point and its three equivalent representations.
p = ComplexPoint(np.array([1.0 + 2.0j, -0.5 + 0.25j]))
r = to_real(p)
c = to_conjugate(p)
print("z =", p.z)
print("r =", r.r)
print("c =", c.c)
print("back from c:", from_conjugate(c).z)
print()

# The mapping matrix and its friends.  J is invertible with inverse
# J^H / 2, S swaps the two blocks, and C flips the sign of the bottom.
mats = StructureMatrices(2)
print("J =")
print(mats.J)
print("inv(J) - J^H/2 max residual:",
      np.abs(np.linalg.inv(mats.J) - 0.5 * mats.J.conj().T).max())
print("S @ S = identity:", np.array_equal(mats.S @ mats.S, np.eye(4)))
print("det S =", np.linalg.det(mats.S), "(equals (-1)^n)")
print()

# Vectors in conjugate coordinates must satisfy conj(b) = S b.  The
# conjugate stack of any z does; an arbitrary vector does not.
b = c.c
print("pairing residual of a conjugate stack:",
      np.abs(np.conj(b) - swap(b)).max())

# Matrices acting on such stacks must commute with that pairing.  The
# projector makes any matrix compliant and is idempotent.
m = np.arange(16, dtype=complex).reshape(4, 4) + 1j
print("random matrix admissible?", is_admissible_matrix(m))
pm = project_admissible(m)
print("projected admissible?", is_admissible_matrix(pm))
print("projecting twice changes nothing:",
      np.abs(project_admissible(pm) - pm).max())
print()

# A linear change of variables xi = A z pushes gradients forward by A
# and pulls the metric back by inv(A)^H inv(A).  The report checks the
# differential, the inner product, and the gradient law on probe data.
a = np.array([[2.0, 1.0j], [0.0, 1.0 - 1.0j]])
report = verify_transform_laws(a, p)
print("transform law residuals:", report.max_residual)
print("metric seen in the new variables:")
print(report.omega_xi)
