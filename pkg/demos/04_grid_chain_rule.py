"""Convergence of the discrete chain rule for f o T on a grid.

Quadratic data under reflection gives a residual at rounding level: the
reflection permutes cell centres and central differences are exact on
quadratics.  A sine under a contraction exercises interpolation for real,
and the residual falls by about four each time h halves.
"""

import math

from oplab import AffineMap, GridDomain, builtin_function, verify_chain_rule

for n in (1, 2):
    print(f"{n}-d unit box")
    previous = None
    for m in (16, 32, 64, 128):
        domain = GridDomain.unit(n, m)
        sine = verify_chain_rule(builtin_function("sine", domain), AffineMap.contraction(domain, 0.5))
        quad = verify_chain_rule(builtin_function("quadratic", domain), AffineMap.reflection(domain))
        order = "" if previous is None else f"  order {math.log2(previous / sine.max_abs_residual):.3f}"
        print(f"  m = {m:>3}: sine/contraction {sine.max_abs_residual:.3e}{order};  quadratic/reflection {quad.max_abs_residual:.1e}")
        previous = sine.max_abs_residual
