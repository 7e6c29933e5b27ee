"""
Continuous no-regret ascent
===========================

When the solution s(theta) solves a smooth problem, the fairness F(s(theta))
can be climbed in theta using the implicit-function gradient. The quadratic
toy has s(theta) = (theta, theta) and F = -(s1 - 1/2)^2, so the gradient is
2*theta - 1 and ascent from theta = 0.6 runs to the boundary theta = 1.
"""

import numpy as np

from noregret import SingularHessian
from noregret.continuous import (
    AscentConfig,
    alternating_ascent,
    fairness_gradient,
    finite_difference_audit,
    quadratic_toy,
    simplex_relaxation,
)

toy = quadratic_toy()

# The implicit gradient against its closed form.
for theta in np.linspace(0.1, 0.9, 5):
    g = fairness_gradient(toy, theta, toy.solve_inner(theta))[0]
    print(f"theta={theta:.1f}  G={g:+.6f}  2*theta-1={2 * theta - 1:+.6f}")

# And against central differences of F(s(theta)).
audit = finite_difference_audit(toy, 0.3, 1e-5)
print("finite-difference deviation:", audit.max_deviation)

trace = alternating_ascent(toy, AscentConfig(exact_inner=True), [0.0, 0.0], [0.6])
print(f"\nascent: {trace.reason} after {len(trace) - 1} steps, theta = {trace.final_theta[0]:.6f}")

# A linear objective over the simplex has a zero Hessian. The gradient does
# not exist there and the solver says so instead of returning a number.
try:
    fairness_gradient(simplex_relaxation(), 0.5, np.full(6, 1 / 3))
except SingularHessian as exc:
    print("\nsimplex relaxation:", exc)
