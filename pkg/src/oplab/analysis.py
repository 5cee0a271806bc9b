"""Kernel, injectivity and ascent of ``C_T f = f ∘ T`` on a finite atomic space.

On atoms every function lies in every Orlicz space and the weak-derivative
part of the Orlicz-Sobolev norm is absent, so the kernel of ``C_T`` is
exactly the set of functions vanishing (almost everywhere) off the zero set
of the density ``f_T``.  The procedures here read everything off the
pushforward measures; :mod:`oplab.oracle` re-derives the same answers by
composing functions instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SingularTransformation, TheoremViolation
from .measure import (
    AtomicMeasureSpace,
    AtomMap,
    RNDerivative,
    is_expansive,
    is_measure_preserving,
    is_nonsingular,
    measures_equivalent,
    pushforward,
    rn_derivative,
    zero_set,
)

__all__ = [
    "KernelDescription",
    "InjectivityVerdict",
    "AscentResult",
    "AnalysisReport",
    "kernel",
    "is_injective",
    "essential_image",
    "ascent",
    "analyze",
]


@dataclass(frozen=True)
class KernelDescription:
    """``ker C_T`` = functions supported in ``omega0``.

    ``kernel_dimension`` counts positive-mass atoms of ``omega0``; null atoms
    carry no function classes.
    """

    omega0: frozenset
    kernel_dimension: int
    is_zero_operator: bool
    density: RNDerivative


@dataclass(frozen=True)
class InjectivityVerdict:
    injective: bool
    essentially_surjective: bool
    image: frozenset
    missed_mass: Fraction

    def __bool__(self) -> bool:
        return self.injective


@dataclass(frozen=True)
class AscentResult:
    """``certificate`` holds the zero sets ``Omega_1, ..., Omega_{ascent+1}``.

    ``ascent`` is ``None`` only when a caller-imposed ``max_k`` cut the search
    short; without a cap the chain always settles within the atom count.
    """

    ascent: int | None
    stabilized_zero_set: frozenset | None
    certificate: tuple

    @property
    def stabilized(self) -> bool:
        return self.ascent is not None


@dataclass(frozen=True)
class AnalysisReport:
    atoms: tuple
    nonsingular: bool
    singular_witness: tuple | None = None
    kernel: KernelDescription | None = None
    injective: bool | None = None
    essentially_surjective: bool | None = None
    measure_preserving: bool | None = None
    expansive: bool | None = None
    ascent: AscentResult | None = None


def _require_nonsingular(T: AtomMap, space: AtomicMeasureSpace) -> None:
    check = is_nonsingular(T, space)
    if not check:
        raise SingularTransformation(check.witness)


def kernel(T: AtomMap, space: AtomicMeasureSpace) -> KernelDescription:
    _require_nonsingular(T, space)
    d = rn_derivative(pushforward(T, space, 1), space)
    omega0 = zero_set(d)
    positive = space.positive_atoms
    return KernelDescription(
        omega0=omega0,
        kernel_dimension=len(omega0 & positive),
        is_zero_operator=space.measure(set(range(len(space))) - omega0) == 0,
        density=d,
    )


def essential_image(T: AtomMap, space: AtomicMeasureSpace) -> frozenset:
    """Image of the positive-mass atoms.

    ``T`` is only determined up to null sets, so images of null atoms do not
    count towards ``T(Omega)``.
    """
    return T.image(space.positive_atoms)


def is_injective(T: AtomMap, space: AtomicMeasureSpace) -> InjectivityVerdict:
    """Trivial kernel and essential surjectivity, computed separately and cross-checked."""
    kd = kernel(T, space)
    image = essential_image(T, space)
    missed = space.measure(set(range(len(space))) - image)
    verdict = InjectivityVerdict(kd.kernel_dimension == 0, missed == 0, image, missed)
    if verdict.injective != verdict.essentially_surjective:
        raise TheoremViolation(
            f"trivial kernel = {verdict.injective} but essentially surjective = "
            f"{verdict.essentially_surjective} for T = {T.mapping}, weights = {space.weights}"
        )
    return verdict


def ascent(T: AtomMap, space: AtomicMeasureSpace, max_k: int | None = None, extra_checks: int = 2) -> AscentResult:
    """First k with ``mu_k`` and ``mu_{k+1}`` equivalent.

    The zero sets of ``f_{T^k}`` grow with k, so on n atoms the chain settles
    by ``k = n``.  After it settles, ``extra_checks`` further steps are computed
    to confirm it stays put.
    """
    _require_nonsingular(T, space)
    limit = len(space) if max_k is None else max_k
    mu = [pushforward(T, space, 1)]
    chain = [zero_set(rn_derivative(mu[0], space))]
    k = 1
    while k <= limit:
        mu.append(pushforward(T, space, k + 1))
        chain.append(zero_set(rn_derivative(mu[k], space)))
        if not chain[k - 1] <= chain[k]:
            raise TheoremViolation(f"zero sets shrink between k={k} and k={k + 1}")
        if measures_equivalent(mu[k - 1], mu[k]):
            for j in range(k + 2, k + 2 + extra_checks):
                later = zero_set(rn_derivative(pushforward(T, space, j), space))
                if later != chain[k]:
                    raise TheoremViolation(f"kernel chain moved again at k={j} after settling at k={k}")
            return AscentResult(k, chain[k], tuple(chain))
        k += 1
    if max_k is None:
        raise TheoremViolation(f"zero-set chain did not settle within {len(space)} steps")
    return AscentResult(None, None, tuple(chain))


def analyze(T: AtomMap, space: AtomicMeasureSpace, max_k: int | None = None) -> AnalysisReport:
    """Run every procedure and cross-check the implications between them."""
    check = is_nonsingular(T, space)
    if not check:
        return AnalysisReport(space.atoms, False, check.witness)
    kd = kernel(T, space)
    inj = is_injective(T, space)
    preserving = is_measure_preserving(T, space)
    expansive = is_expansive(T, space)
    asc = ascent(T, space, max_k)
    if asc.stabilized:
        for name, flag in (
            ("measure preserving", preserving),
            ("expansive", expansive),
            ("essentially surjective", inj.essentially_surjective),
        ):
            if flag and asc.ascent != 1:
                raise TheoremViolation(f"T is {name} but the ascent is {asc.ascent}")
        if kd.omega0 != asc.certificate[0]:
            raise TheoremViolation("kernel zero set differs from the first ascent zero set")
    if kd.is_zero_operator:
        raise TheoremViolation("mass conservation rules out the zero operator on a nonzero measure")
    return AnalysisReport(
        atoms=space.atoms,
        nonsingular=True,
        kernel=kd,
        injective=inj.injective,
        essentially_surjective=inj.essentially_surjective,
        measure_preserving=preserving,
        expansive=expansive,
        ascent=asc,
    )
