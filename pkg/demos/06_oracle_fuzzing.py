"""Random instances checked against brute-force oracles.

Instances come from numpy's PCG64 generator, so a seed pins the stream.  Any
disagreement between the measure-based procedures and the oracles would be
reported with the offending instance.
"""

import itertools

from oplab.oracle import InstanceGenerator, fuzz, generate

for space, T in itertools.islice(generate(InstanceGenerator(seed=3, max_atoms=5)), 3):
    print("weights", [str(w) for w in space.weights], "map", T.mapping)

for seed in (1, 2, 3):
    summary = fuzz(seed=seed, instances=500, max_atoms=10)
    print(f"seed {seed}: {summary.line()}")
