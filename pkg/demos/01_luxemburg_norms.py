"""Luxemburg norms on a small atomic space.

For phi(t) = t^p the Luxemburg norm is the ordinary weighted p-norm, which
gives a closed form to compare against.  The exponential N-function has no
such shortcut, and it also fails the Delta_2 growth condition.
"""

import numpy as np

from oplab import AtomicMeasureSpace, ExpMinus, Power, PowerLog, delta2_check, luxemburg_norm, modular

space = AtomicMeasureSpace(["a", "b", "c"], ["1/2", "1/3", "1/6"])
f = np.array([3.0, -1.0, 2.0])
w = space.float_weights()

print("weights:", [str(x) for x in space.weights])
print("f:", f)
for p in (1.5, 2, 3):
    closed = float(np.sum(w * np.abs(f) ** p) ** (1 / p))
    print(f"p = {p}: Luxemburg {luxemburg_norm(Power(p), f, space):.12f}  closed form {closed:.12f}")

# The norm is the scale lambda at which the modular of f/lambda crosses 1.
phi = PowerLog(1)
lam = luxemburg_norm(phi, f, space)
print(f"\nt log(1+t): norm {lam:.12f}, modular of f/norm = {modular(phi, f / lam, space).value:.12f}")
print(f"e^t - 1 - t: norm {luxemburg_norm(ExpMinus(), f, space):.12f}")

for phi in (Power(2), PowerLog(1), ExpMinus()):
    r = delta2_check(phi, 1.0, 40.0, samples=8)
    ratios = ", ".join(f"{x:.3g}" for x in r.ratios)
    print(f"\nphi(2u)/phi(u) for {phi.label} on u in [1, 40]: {ratios}")
    print(f"  Delta_2 satisfied: {r.satisfied_on_sample}")
