"""Kernel, injectivity and ascent of f -> f o T, computed two ways.

The analysis module reads everything off the pushforward measures.  The
oracle module composes indicator functions with powers of T and never looks
at a measure.  They should always agree.
"""

from oplab import AtomicMeasureSpace, AtomMap, analyze
from oplab.oracle import oracle_ascent, oracle_kernel

cases = {
    "identity": (AtomicMeasureSpace("abc", ["1/2", "1/3", "1/6"]), AtomMap([0, 1, 2])),
    "chain of five": (AtomicMeasureSpace(range(1, 6), [1, 2, "1/2", 3, 1]), AtomMap([1, 2, 3, 4, 4])),
    "null atom feeding p": (AtomicMeasureSpace("zpq", [0, 1, 1]), AtomMap([1, 2, 2])),
    "rotation": (AtomicMeasureSpace("abcd", [2, 2, 2, 2]), AtomMap([1, 2, 3, 0])),
}

for name, (space, T) in cases.items():
    r = analyze(T, space)
    omega0 = sorted(str(space.atoms[i]) for i in r.kernel.omega0)
    probed = sorted(str(space.atoms[i]) for i in oracle_kernel(T, space) & space.positive_atoms)
    print(f"{name}:")
    print(f"  Omega_0 = {omega0}; oracle kernel on positive atoms = {probed}")
    print(f"  injective {r.injective}, essentially surjective {r.essentially_surjective}")
    print(f"  measure preserving {r.measure_preserving}, expansive {r.expansive}")
    print(f"  ascent {r.ascent.ascent} (oracle {oracle_ascent(T, space)})")

# The null atom z is sent onto p, but z carries no mass, so p is still
# missed by T and the kernel is nontrivial.
