import itertools

import pytest

from oplab.analysis import ascent, kernel
from oplab.errors import RejectionExhausted, TooManyAtoms, ValidationError
from oplab.measure import AtomicMeasureSpace, AtomMap, is_expansive, is_measure_preserving, is_nonsingular
from oplab.oracle import (
    InstanceGenerator,
    compare_instance,
    essentially_surjective_instances,
    exhaustive_instances,
    expansive_instances,
    fuzz,
    generate,
    measure_preserving_instances,
    oracle_ascent,
    oracle_expansive,
    oracle_kernel,
    oracle_kernel_power,
)

UNIT3 = AtomicMeasureSpace([1, 2, 3], [1, 1, 1])
SHIFT_TO_SINK = AtomMap([1, 2, 2])


def take(gen, n):
    return list(itertools.islice(generate(gen), n))


class TestOracleKernel:
    def test_identity(self):
        assert oracle_kernel(AtomMap.identity(3), UNIT3) == frozenset()

    def test_shift_to_sink(self):
        assert oracle_kernel(SHIFT_TO_SINK, UNIT3) == {0}
        assert oracle_kernel_power(SHIFT_TO_SINK, UNIT3, 2) == {0, 1}

    def test_unreached_positive_atom(self):
        space = AtomicMeasureSpace("abcd", [2, 1, "1/2", 1])
        T = AtomMap([0, 0, 1, 2])  # nothing lands on d
        assert 3 in oracle_kernel(T, space)


class TestOracleAscent:
    def test_examples(self):
        assert oracle_ascent(AtomMap.identity(3), UNIT3) == 1
        assert oracle_ascent(SHIFT_TO_SINK, UNIT3) == 2

    @pytest.mark.parametrize("m", range(2, 9))
    def test_chain(self, m):
        space = AtomicMeasureSpace(range(m), [1] * m)
        assert oracle_ascent(AtomMap([min(i + 1, m - 1) for i in range(m)]), space) == m - 1

    def test_cap(self):
        space = AtomicMeasureSpace(range(5), [1] * 5)
        assert oracle_ascent(AtomMap([1, 2, 3, 4, 4]), space, max_k=2) is None


class TestOracleExpansive:
    def test_permutation(self):
        space = AtomicMeasureSpace("abc", [2, 2, 2])
        assert oracle_expansive(AtomMap([1, 2, 0]), space)

    def test_two_atom_counterexample(self):
        check = oracle_expansive(AtomMap([0, 0]), AtomicMeasureSpace("ab", [1, 1]))
        assert not check and check.witness == {1}

    def test_empty_set_never_a_witness(self):
        for space, T in exhaustive_instances(3, nonsingular_only=False):
            check = oracle_expansive(T, space)
            assert check.witness != frozenset()

    def test_too_many_atoms(self):
        space = AtomicMeasureSpace(range(13), [1] * 13)
        with pytest.raises(TooManyAtoms):
            oracle_expansive(AtomMap.identity(13), space)

    def test_agrees_with_atomwise_criterion(self):
        for space, T in take(InstanceGenerator(5, max_atoms=12, nonsingular_only=False), 300):
            assert bool(oracle_expansive(T, space)) == is_expansive(T, space)


class TestGenerator:
    def test_deterministic(self):
        a = take(InstanceGenerator(123, max_atoms=5), 50)
        b = take(InstanceGenerator(123, max_atoms=5), 50)
        assert [(s.weights, T.mapping) for s, T in a] == [(s.weights, T.mapping) for s, T in b]
        c = take(InstanceGenerator(124, max_atoms=5), 50)
        assert [T.mapping for _, T in a] != [T.mapping for _, T in c]

    def test_nonsingular_only(self):
        for space, T in take(InstanceGenerator(9, max_atoms=8), 500):
            assert is_nonsingular(T, space)
            assert 1 <= len(space) <= 8

    def test_pool_without_zero_never_rejects(self):
        # a cap of one draw would fail on the first rejection
        gen = InstanceGenerator(3, max_atoms=10, weight_pool=("1", "2", "1/3"), rejection_cap=1)
        assert len(take(gen, 500)) == 500

    def test_rejection_exhausted(self):
        gen = InstanceGenerator(0, max_atoms=12, min_atoms=12, weight_pool=("0", "1"), rejection_cap=1)
        with pytest.raises(RejectionExhausted):
            take(gen, 100)

    @pytest.mark.parametrize(
        "kwargs",
        [{"max_atoms": 13}, {"max_atoms": 3, "min_atoms": 4}, {"weight_pool": ("0",)}, {"weight_pool": ("-1", "1")}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            InstanceGenerator(0, **kwargs)


class TestSpecialFamilies:
    def test_measure_preserving(self):
        for space, T in measure_preserving_instances(1, 100):
            assert is_measure_preserving(T, space)

    def test_expansive(self):
        found = list(expansive_instances(2, 50))
        assert len(found) == 50
        assert all(oracle_expansive(T, space) for space, T in found)

    def test_essentially_surjective(self):
        for space, T in essentially_surjective_instances(3, 100):
            assert is_nonsingular(T, space)
            assert T.image(space.positive_atoms) == space.positive_atoms


class TestAgreement:
    def test_exhaustive_sweep(self):
        instances = list(exhaustive_instances(3))
        assert len(instances) == 440
        for space, T in instances:
            assert compare_instance(T, space) == []
            assert oracle_kernel(T, space) & space.positive_atoms == kernel(T, space).omega0 & space.positive_atoms
            assert oracle_ascent(T, space) == ascent(T, space).ascent

    def test_fuzz(self):
        summary = fuzz(seed=11, instances=300, max_atoms=10)
        assert summary.ok and summary.line() == "300/300 agree"
        assert summary.counterexample is None

    def test_fuzz_zero_instances(self):
        assert fuzz(seed=1, instances=0).line() == "0/0 agree"

    def test_corrupted_ascent_is_caught(self):
        def off_by_one(T, space, max_k=None):
            r = ascent(T, space, max_k)
            return type(r)(r.ascent + 1, r.stabilized_zero_set, r.certificate)

        summary = fuzz(seed=11, instances=20, ascent_fn=off_by_one)
        assert summary.agreements == 0
        space, T, problems = summary.counterexample
        assert any(p.startswith("ascent") for p in problems)
