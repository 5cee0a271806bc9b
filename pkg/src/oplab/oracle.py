"""Brute-force re-derivations of the kernel, ascent and expansiveness answers.

Nothing here touches densities or pushforward measures.  Kernels are found by
composing indicator functions with ``T`` and asking whether the result
vanishes almost everywhere.  Indicators are enough: ``f ∘ T`` vanishes a.e.
iff ``f(T(x)) = 0`` for every positive-mass atom ``x``, which only depends on
the support of ``f``, so ``f`` lies in the kernel iff every ``e_a`` with
``f(a) != 0`` does.  The kernel is therefore the span of the probed
indicators.

Random instances come from numpy's PCG64 bit generator (``numpy.random.Generator``),
whose stream is fixed for a given seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .analysis import ascent, is_injective, kernel
from .errors import (
    RejectionExhausted,
    SingularTransformation,
    TheoremViolation,
    TooManyAtoms,
    ValidationError,
)
from .measure import (
    AtomicMeasureSpace,
    AtomMap,
    is_expansive,
    is_nonsingular,
    to_fraction,
)

__all__ = [
    "InstanceGenerator",
    "ExpansiveCheck",
    "FuzzSummary",
    "oracle_kernel",
    "oracle_kernel_power",
    "oracle_ascent",
    "oracle_expansive",
    "generate",
    "exhaustive_instances",
    "measure_preserving_instances",
    "expansive_instances",
    "essentially_surjective_instances",
    "compare_instance",
    "fuzz",
]

MAX_ENUMERATION_ATOMS = 12
DEFAULT_POOL = ("0", "1", "2", "1/2", "3")


def _compose_power(mapping: list[int], k: int) -> list[int]:
    current = list(range(len(mapping)))
    for _ in range(k):
        current = [mapping[j] for j in current]
    return current


def _kernel_probe(mapping: list[int], weights) -> frozenset:
    n = len(mapping)
    members = set()
    for a in range(n):
        indicator = [1 if i == a else 0 for i in range(n)]
        pulled_back = [indicator[mapping[x]] for x in range(n)]
        if all(v == 0 or weights[x] == 0 for x, v in enumerate(pulled_back)):
            members.add(a)
    return frozenset(members)


def oracle_kernel(T: AtomMap, space: AtomicMeasureSpace) -> frozenset:
    """Atoms ``a`` whose indicator is killed by ``C_T``."""
    return _kernel_probe(list(T.mapping), space.weights)


def oracle_kernel_power(T: AtomMap, space: AtomicMeasureSpace, k: int) -> frozenset:
    return _kernel_probe(_compose_power(list(T.mapping), k), space.weights)


def oracle_ascent(T: AtomMap, space: AtomicMeasureSpace, max_k: int | None = None) -> int | None:
    """First k with ``ker C_{T^k} = ker C_{T^{k+1}}``, from explicit powers of T.

    Returns ``None`` if the chain has not settled after ``max_k`` steps
    (default: atom count + 1).
    """
    limit = len(space) + 1 if max_k is None else max_k
    mapping = list(T.mapping)
    power = mapping
    previous = _kernel_probe(power, space.weights)
    for k in range(1, limit + 1):
        power = [mapping[j] for j in power]
        current = _kernel_probe(power, space.weights)
        if current == previous:
            return k
        previous = current
    return None


@dataclass(frozen=True)
class ExpansiveCheck:
    expansive: bool
    witness: frozenset | None = None

    def __bool__(self) -> bool:
        return self.expansive


def oracle_expansive(T: AtomMap, space: AtomicMeasureSpace) -> ExpansiveCheck:
    """``mu(T^{-1}E) >= mu(E)`` checked on all ``2^n`` subsets E."""
    n = len(space)
    if n > MAX_ENUMERATION_ATOMS:
        raise TooManyAtoms(f"{n} atoms; subset enumeration is capped at {MAX_ENUMERATION_ATOMS}")
    w = space.weights
    mapping = T.mapping
    for bits in range(1 << n):
        E = {i for i in range(n) if bits >> i & 1}
        mass = sum((w[i] for i in E), Fraction(0))
        pre_mass = sum((w[x] for x in range(n) if mapping[x] in E), Fraction(0))
        if pre_mass < mass:
            return ExpansiveCheck(False, frozenset(E))
    return ExpansiveCheck(True)


@dataclass(frozen=True)
class InstanceGenerator:
    seed: int
    max_atoms: int = 8
    weight_pool: tuple = DEFAULT_POOL
    nonsingular_only: bool = True
    min_atoms: int = 1
    rejection_cap: int = 10_000
    _pool: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.min_atoms <= self.max_atoms:
            raise ValidationError("need 1 <= min_atoms <= max_atoms")
        if self.max_atoms > MAX_ENUMERATION_ATOMS:
            raise ValidationError(f"max_atoms is capped at {MAX_ENUMERATION_ATOMS}")
        pool = tuple(to_fraction(w) for w in self.weight_pool)
        if not pool or any(w < 0 for w in pool) or not any(w > 0 for w in pool):
            raise ValidationError("weight pool needs nonnegative rationals, at least one positive")
        object.__setattr__(self, "_pool", pool)


def _draw(rng: np.random.Generator, gen: InstanceGenerator) -> tuple[AtomicMeasureSpace, AtomMap] | None:
    n = int(rng.integers(gen.min_atoms, gen.max_atoms + 1))
    weights = [gen._pool[int(i)] for i in rng.integers(0, len(gen._pool), size=n)]
    mapping = [int(j) for j in rng.integers(0, n, size=n)]
    if not any(w > 0 for w in weights):
        return None
    return AtomicMeasureSpace(range(1, n + 1), weights), AtomMap(mapping)


def generate(gen: InstanceGenerator) -> Iterator[tuple[AtomicMeasureSpace, AtomMap]]:
    """Endless reproducible stream of ``(space, T)`` pairs."""
    rng = np.random.Generator(np.random.PCG64(gen.seed))
    while True:
        for _ in range(gen.rejection_cap):
            drawn = _draw(rng, gen)
            if drawn is None:
                continue
            space, T = drawn
            if gen.nonsingular_only and not is_nonsingular(T, space):
                continue
            yield space, T
            break
        else:
            raise RejectionExhausted(f"no acceptable instance in {gen.rejection_cap} draws")


def exhaustive_instances(max_atoms: int = 3, pool=(0, 1, 2), nonsingular_only: bool = True):
    """Every self-map and every weight assignment from ``pool`` on 1..max_atoms atoms."""
    pool = [to_fraction(w) for w in pool]
    for n in range(1, max_atoms + 1):
        for weights in itertools.product(pool, repeat=n):
            if not any(w > 0 for w in weights):
                continue
            space = AtomicMeasureSpace(range(1, n + 1), weights)
            for mapping in itertools.product(range(n), repeat=n):
                T = AtomMap(mapping)
                if nonsingular_only and not is_nonsingular(T, space):
                    continue
                yield space, T


def measure_preserving_instances(seed: int, count: int, max_atoms: int = 10, pool=("1", "2", "1/3")):
    """Permutations of equal-weight atoms: one random weight for the whole space."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = [to_fraction(w) for w in pool]
    for _ in range(count):
        n = int(rng.integers(1, max_atoms + 1))
        w = pool[int(rng.integers(0, len(pool)))]
        space = AtomicMeasureSpace(range(1, n + 1), [w] * n)
        yield space, AtomMap(int(j) for j in rng.permutation(n))


def expansive_instances(seed: int, count: int, max_atoms: int = 4, pool=(0, 1, 2), cap: int = 1_000_000):
    """Expansive maps found by rejection from the uniform instance stream."""
    gen = InstanceGenerator(seed, max_atoms, tuple(pool), nonsingular_only=True)
    found = 0
    for tries, (space, T) in enumerate(generate(gen)):
        if found == count:
            return
        if tries >= cap:
            raise RejectionExhausted(f"only {found} expansive maps in {cap} draws")
        if is_expansive(T, space):
            found += 1
            yield space, T


def essentially_surjective_instances(seed: int, count: int, max_atoms: int = 10, pool=(0, 1, 2, "1/2")):
    """Nonsingular, essentially surjective maps.

    Nonsingular maps send positive atoms to positive atoms, so essential
    surjectivity forces a permutation of the positive atoms; null atoms may go
    anywhere.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = [to_fraction(w) for w in pool]
    produced = 0
    while produced < count:
        n = int(rng.integers(1, max_atoms + 1))
        weights = [pool[int(i)] for i in rng.integers(0, len(pool), size=n)]
        positive = [i for i, w in enumerate(weights) if w > 0]
        if not positive:
            continue
        mapping = [int(j) for j in rng.integers(0, n, size=n)]
        for src, dst in zip(positive, rng.permutation(positive)):
            mapping[src] = int(dst)
        produced += 1
        yield AtomicMeasureSpace(range(1, n + 1), weights), AtomMap(mapping)


def compare_instance(
    T: AtomMap,
    space: AtomicMeasureSpace,
    ascent_fn: Callable | None = None,
    kernel_fn: Callable | None = None,
    max_k: int | None = None,
) -> list[str]:
    """Disagreements between the theorem procedures and the oracles (empty if none)."""
    ascent_fn = ascent_fn or ascent
    kernel_fn = kernel_fn or kernel
    problems = []
    positive = space.positive_atoms
    omega0 = kernel_fn(T, space).omega0
    probed = oracle_kernel(T, space)
    if omega0 & positive != probed & positive:
        problems.append(f"kernel: theorem {sorted(omega0 & positive)} vs oracle {sorted(probed & positive)}")
    try:
        inj = is_injective(T, space)
    except TheoremViolation as exc:
        problems.append(f"injectivity: {exc}")
    else:
        if inj.injective != (not (probed & positive)):
            problems.append("injectivity: verdict differs from the oracle kernel")
    theorem_k = ascent_fn(T, space, max_k).ascent
    oracle_k = oracle_ascent(T, space, max_k)
    if theorem_k != oracle_k:
        problems.append(f"ascent: theorem {theorem_k} vs oracle {oracle_k}")
    if len(space) <= MAX_ENUMERATION_ATOMS and bool(oracle_expansive(T, space)) != is_expansive(T, space):
        problems.append("expansive: atomwise criterion differs from subset enumeration")
    return problems


@dataclass
class FuzzSummary:
    tested: int = 0
    agreements: int = 0
    counterexample: tuple | None = None  # (space, T, problems)

    @property
    def ok(self) -> bool:
        return self.tested == self.agreements

    def line(self) -> str:
        return f"{self.agreements}/{self.tested} agree"


def fuzz(
    seed: int,
    instances: int,
    max_atoms: int = 8,
    max_k: int | None = None,
    ascent_fn: Callable | None = None,
    kernel_fn: Callable | None = None,
) -> FuzzSummary:
    """Compare theorem procedures against the oracles on a seeded instance stream."""
    summary = FuzzSummary()
    if instances <= 0:
        return summary
    stream = generate(InstanceGenerator(seed, max_atoms))
    for space, T in itertools.islice(stream, instances):
        summary.tested += 1
        try:
            problems = compare_instance(T, space, ascent_fn, kernel_fn, max_k)
        except SingularTransformation as exc:
            problems = [f"unexpected singular instance: {exc}"]
        if problems:
            if summary.counterexample is None:
                summary.counterexample = (space, T, problems)
        else:
            summary.agreements += 1
    return summary
