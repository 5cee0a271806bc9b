"""The composition-operator bound and derivative vanishing on a grid.

T(x) = x/2 squeezes [0, 1] into its left half, so its density f_T is 2 on
[0, 1/2] and 0 beyond.  The norm of f o T is bounded by
||f_T||_inf (1 + n M) times the norm of f.  The cells where f_T vanishes
form Omega_0, and functions living there have zero weak derivative away
from the edge of that set.
"""

import numpy as np

from oplab import (
    AffineMap,
    GridDomain,
    GridFunction,
    Power,
    affine_rn_derivative,
    builtin_function,
    verify_boundedness,
    verify_kernel_derivative_vanishing,
)

domain = GridDomain.unit(1, 128)
T = AffineMap.contraction(domain, 0.5)
f = builtin_function("linear", domain)

r = verify_boundedness(Power(2), f, T)
print(f"||f o T||_(1,2) = {r.lhs:.6f}")
print(f"||f_T||_inf (1 + n M) ||f||_(1,2) = {r.rn_sup:g} * (1 + {r.M:g}) * ... = {r.rhs:.6f}")
print(f"bound holds: {r.holds}")

omega0 = affine_rn_derivative(T, domain).samples == 0
x = domain.axis_centers(0)
g = GridFunction(domain, np.where(omega0, np.sin(8 * x), 0.0))
v = verify_kernel_derivative_vanishing(g, omega0)
print(f"\nOmega_0 has {omega0.sum()} of {domain.shape[0]} cells")
print(f"max |g'| away from Omega_0 and its band: {v.max_outside}")
print(f"max |g'| inside the {v.boundary_band_width}-cell band: {v.max_in_band:.3f}")
