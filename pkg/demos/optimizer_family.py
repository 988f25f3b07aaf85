"""
A family of descent strategies
==============================

Scaling the negative gradient by different matrices gives gradient
descent, Newton, and their block-diagonal variants in one loop.  The
scalar channel problem has a closed-form optimum, so each strategy's
path can be judged against the true answer.
"""

import numpy as np

from crcalc import (
    Example1Problem,
    OptimizerConfig,
    QStrategy,
    check_minimum,
    example1_closed_form,
    example1_loss_field,
    example2_as_lsq,
    hessian_quad,
    minimize,
)

# Observations y = alpha z + beta conj(z) + noise, with z unknown.
problem = Example1Problem.synthesize(
    alpha=1.0 + 1.0j,
    beta=0.3 - 0.2j,
    z_true=2.0 - 1.0j,
    noise_var=0.05,
    n_samples=200,
    seed=0,
)
field = example1_loss_field(problem)
lsq = example2_as_lsq(problem)
z_hat = example1_closed_form(problem)
print("closed-form optimum:", z_hat)
print()

# The same start for every strategy; residual-based scalings take the
# weighted-residual formulation of the identical loss.
z0 = np.array([4.0 + 3.0j])
config = OptimizerConfig(max_iters=5000, grad_tol=1e-8)
targets = {
    "identity": field,
    "newton": field,
    "quasi_newton": field,
    "gauss_newton": lsq,
    "quasi_gauss_newton": lsq,
}
print(f"{'strategy':<20} {'iters':>5} {'final error':>12}")
for kind, target in targets.items():
    result = minimize(target, z0, QStrategy(kind=kind), config)
    err = abs(result.z[0] - z_hat)
    print(f"{kind:<20} {result.iterations:>5} {err:>12.3e}")
print()

# Newton jumps to the optimum in one step because this loss is an
# exact quadratic; the curvature there confirms a minimum.
quad = hessian_quad(field, np.array([z_hat]))
print("curvature at the optimum:", check_minimum(quad))

# Per-iteration history of the slowest strategy.
result = minimize(field, z0, QStrategy(kind="identity"), config)
losses = result.trace.losses
print("identity-scaling loss, first five iterations:",
      [float(round(v, 6)) for v in losses[:5]])
print("iterations to converge:", result.iterations)
