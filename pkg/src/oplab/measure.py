"""Finite atomic measure spaces, self-maps of atoms, pushforwards and densities.

Every quantity here is an exact :class:`fractions.Fraction`.  The sigma-algebra
is the full power set of the atom list, so every map is measurable and a
measure is determined by its atom weights.  Atoms are addressed by their
position in ``AtomicMeasureSpace.atoms``; sets of atoms are frozensets of
positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityViolated,
    CarrierMismatch,
    NotEquivalent,
    ValidationError,
)

__all__ = [
    "AtomicMeasureSpace",
    "AtomMap",
    "PushforwardMeasure",
    "RNDerivative",
    "NonsingularityCheck",
    "to_fraction",
    "is_nonsingular",
    "pushforward",
    "rn_derivative",
    "zero_set",
    "measures_equivalent",
    "rn_chain_factor",
    "is_measure_preserving",
    "is_expansive",
]


def to_fraction(value) -> Fraction:
    """Parse an exact rational from an int, Fraction or a ``"p/q"`` string.

    Floats are refused: they would smuggle binary rounding into the exact layer.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {value!r}") from exc
    raise ValidationError(f"weights must be int, Fraction or 'p/q' strings, got {type(value).__name__}")


@dataclass(frozen=True)
class AtomicMeasureSpace:
    atoms: tuple
    weights: tuple

    def __init__(self, atoms: Iterable[Hashable], weights: Iterable):
        atoms = tuple(atoms)
        weights = tuple(to_fraction(w) for w in weights)
        if len(atoms) != len(weights):
            raise ValidationError(f"{len(atoms)} atoms but {len(weights)} weights")
        if not atoms:
            raise ValidationError("a measure space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValidationError("atom identifiers must be unique")
        if any(w < 0 for w in weights):
            raise ValidationError("weights must be nonnegative")
        if not any(w > 0 for w in weights):
            raise ValidationError("at least one atom must carry positive mass")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, n: int, weight=1) -> "AtomicMeasureSpace":
        return cls(range(1, n + 1), [weight] * n)

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, atom) -> int:
        return self.atoms.index(atom)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def null_atoms(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.weights) if w == 0)

    @property
    def positive_atoms(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.weights) if w > 0)

    def measure(self, subset: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in set(subset)), Fraction(0))

    def float_weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


@dataclass(frozen=True)
class AtomMap:
    """A total self-map of ``n`` atoms, stored as the tuple of image indices."""

    mapping: tuple

    def __init__(self, mapping: Sequence[int]):
        mapping = tuple(int(j) for j in mapping)
        n = len(mapping)
        if n == 0:
            raise ValidationError("empty map")
        bad = [j for j in mapping if not 0 <= j < n]
        if bad:
            raise ValidationError(f"map is not total on {n} atoms: image index {bad[0]} out of range")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> "AtomMap":
        return cls(range(n))

    @classmethod
    def from_table(cls, space: AtomicMeasureSpace, table: Mapping) -> "AtomMap":
        """Build from ``{atom: image_atom}`` keyed by atom identifiers."""
        missing = [a for a in space.atoms if a not in table]
        if missing:
            raise ValidationError(f"no image given for atom {missing[0]!r}")
        extra = [a for a in table if a not in space.atoms]
        if extra:
            raise ValidationError(f"unknown atom {extra[0]!r} in mapping table")
        try:
            return cls(space.index(table[a]) for a in space.atoms)
        except ValueError as exc:
            raise ValidationError(f"mapping sends an atom outside the space: {exc}") from exc

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def then(self, other: "AtomMap") -> "AtomMap":
        """``other ∘ self``: apply self first."""
        return AtomMap(other.mapping[j] for j in self.mapping)

    def power(self, k: int) -> "AtomMap":
        if k < 0:
            raise ValidationError("negative power of a non-invertible map")
        result = AtomMap.identity(len(self))
        for _ in range(k):
            result = result.then(self)
        return result

    def image(self, domain: Iterable[int] | None = None) -> frozenset:
        if domain is None:
            return frozenset(self.mapping)
        return frozenset(self.mapping[i] for i in domain)

    def preimage(self, subset: Iterable[int]) -> frozenset:
        subset = set(subset)
        return frozenset(i for i, j in enumerate(self.mapping) if j in subset)


@dataclass(frozen=True)
class PushforwardMeasure:
    order: int
    weights: tuple

    def __len__(self) -> int:
        return len(self.weights)

    def measure(self, subset: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in set(subset)), Fraction(0))

    @property
    def null_atoms(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.weights) if w == 0)


@dataclass(frozen=True)
class RNDerivative:
    order: int
    values: tuple

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class NonsingularityCheck:
    nonsingular: bool
    witness: tuple | None = None  # (x, T(x)) with mu(x) > 0 = mu(T(x))

    def __bool__(self) -> bool:
        return self.nonsingular


def _check_sizes(T: AtomMap, space: AtomicMeasureSpace) -> None:
    if len(T) != len(space):
        raise CarrierMismatch(f"map acts on {len(T)} atoms, space has {len(space)}")


def is_nonsingular(T: AtomMap, space: AtomicMeasureSpace) -> NonsingularityCheck:
    """Preimages of null atoms must be null.  Truthy result; carries a witness on failure."""
    _check_sizes(T, space)
    w = space.weights
    for x, a in enumerate(T.mapping):
        if w[a] == 0 and w[x] > 0:
            return NonsingularityCheck(False, (x, a))
    return NonsingularityCheck(True)


def pushforward(T: AtomMap, space: AtomicMeasureSpace, k: int = 1) -> PushforwardMeasure:
    """The measure ``mu ∘ T^{-k}`` on atoms."""
    _check_sizes(T, space)
    if k < 1:
        raise ValidationError(f"pushforward order must be >= 1, got {k}")
    Tk = T.power(k)
    out = [Fraction(0)] * len(space)
    for x, a in enumerate(Tk.mapping):
        out[a] += space.weights[x]
    return PushforwardMeasure(k, tuple(out))


def rn_derivative(mu_k: PushforwardMeasure, space: AtomicMeasureSpace) -> RNDerivative:
    """Density of ``mu_k`` against ``mu``: the atomwise weight ratio, 0 on null atoms."""
    if len(mu_k) != len(space):
        raise CarrierMismatch("pushforward and space have different atom counts")
    values = []
    for i, (m, w) in enumerate(zip(mu_k.weights, space.weights)):
        if w == 0:
            if m != 0:
                raise AbsoluteContinuityViolated(space.atoms[i])
            values.append(Fraction(0))
        else:
            values.append(m / w)
    return RNDerivative(mu_k.order, tuple(values))


def zero_set(d: RNDerivative) -> frozenset:
    return frozenset(i for i, v in enumerate(d.values) if v == 0)


def measures_equivalent(m1: PushforwardMeasure, m2: PushforwardMeasure) -> bool:
    """Mutual absolute continuity, which on atoms means identical null atoms."""
    if len(m1) != len(m2):
        raise CarrierMismatch("measures live on different atom counts")
    return m1.null_atoms == m2.null_atoms


def rn_chain_factor(
    m_k: PushforwardMeasure, m_k1: PushforwardMeasure, space: AtomicMeasureSpace
) -> tuple:
    """``d mu_k / d mu_{k+1}`` atomwise, with the value 1 on common null atoms.

    With this factor ``f_{T^k} = factor * f_{T^{k+1}}`` holds at every atom.
    """
    if len(m_k) != len(space) or len(m_k1) != len(space):
        raise CarrierMismatch("measures and space have different atom counts")
    if not measures_equivalent(m_k, m_k1):
        diff = sorted(m_k.null_atoms ^ m_k1.null_atoms)
        raise NotEquivalent(f"null atoms differ at {space.atoms[diff[0]]!r}")
    return tuple(
        Fraction(1) if b == 0 else a / b for a, b in zip(m_k.weights, m_k1.weights)
    )


def is_measure_preserving(T: AtomMap, space: AtomicMeasureSpace) -> bool:
    return pushforward(T, space, 1).weights == space.weights


def is_expansive(T: AtomMap, space: AtomicMeasureSpace) -> bool:
    """``mu(T^{-1}E) >= mu(E)`` for every E, checked atom by atom.

    Summing the atomwise inequalities over E gives the set inequality, and a
    failing atom is itself a failing singleton, so no subset enumeration is needed.
    """
    mu1 = pushforward(T, space, 1)
    return all(a >= w for a, w in zip(mu1.weights, space.weights))
