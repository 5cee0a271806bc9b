"""Iterating a map on three atoms and watching its densities.

The map sends 1 to 2, 2 to 3 and keeps 3 fixed.  Mass drains into atom 3,
so the Radon-Nikodym density of mu o T^-k picks up zeros one step at a time
until two consecutive pushforwards are equivalent.
"""

from oplab import (
    AtomicMeasureSpace,
    AtomMap,
    is_nonsingular,
    measures_equivalent,
    pushforward,
    rn_chain_factor,
    rn_derivative,
    zero_set,
)

space = AtomicMeasureSpace([1, 2, 3], [1, 1, 1])
T = AtomMap.from_table(space, {1: 2, 2: 3, 3: 3})

previous = None
for k in range(1, 5):
    mu_k = pushforward(T, space, k)
    density = rn_derivative(mu_k, space)
    zeros = sorted(space.atoms[i] for i in zero_set(density))
    print(f"k = {k}: mu_k = {[str(x) for x in mu_k.weights]}, zero set of f_(T^k) = {zeros}")
    if previous is not None and measures_equivalent(previous, mu_k):
        factor = rn_chain_factor(previous, mu_k, space)
        print(f"  mu_{k - 1} and mu_{k} are equivalent; f_(T^{k - 1}) = h * f_(T^{k}) with h = {[str(x) for x in factor]}")
    previous = mu_k

# A map is nonsingular when it never sends positive mass onto a null atom.
null_target = AtomicMeasureSpace(["a", "b"], [1, 0])
check = is_nonsingular(AtomMap([1, 1]), null_target)
x, image = (null_target.atoms[i] for i in check.witness)
print(f"\na -> b with mu(b) = 0: nonsingular = {check.nonsingular}, witness: {x} has mass, its image {image} has none")
