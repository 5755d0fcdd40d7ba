"""Partitions, congruences, quotients: checked against exhaustive
enumeration of all partitions for small carriers."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psvar import (
    Congruence,
    Partition,
    all_congruences,
    congruence_generated,
    is_congruence,
    join,
    meet,
    meet_partitions,
    quotient_algebra,
    refines,
)
from psvar.errors import NotACongruenceError
from psvar.partitions import canonical_labels

from .helpers import (
    all_partition_labels,
    brute_all_congruence_labels,
    brute_is_congruence,
    semilattice2,
    trivial,
    z_mod,
)


def test_all_partition_labels_counts_are_bell_numbers():
    assert [len(all_partition_labels(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
def test_canonical_labels_first_occurrence_order(labels):
    canon = canonical_labels(labels)
    seen = []
    for orig, new in zip(labels, canon):
        if orig not in seen:
            seen.append(orig)
        assert new == seen.index(orig)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.permutations(range(4)))
def test_canonical_labels_invariant_under_relabeling(labels, perm):
    relabeled = [perm[x] for x in labels]
    assert canonical_labels(labels) == canonical_labels(relabeled)


def test_partition_requires_canonical_form():
    Partition(3, (0, 1, 0))
    with pytest.raises(Exception):
        Partition(3, (1, 0, 1))


def test_refines_and_meet_against_definitions():
    """refines and meet agree with the pair-set definitions on every
    partition pair of a 4-element carrier (15 x 15 pairs)."""
    parts = [Partition(4, labels) for labels in all_partition_labels(4)]
    for p, q in itertools.product(parts, repeat=2):
        p_pairs = {(a, b) for a in range(4) for b in range(4) if p.related(a, b)}
        q_pairs = {(a, b) for a in range(4) for b in range(4) if q.related(a, b)}
        assert refines(p, q) == (p_pairs <= q_pairs)
        mt = meet_partitions(p, q)
        mt_pairs = {(a, b) for a in range(4) for b in range(4) if mt.related(a, b)}
        assert mt_pairs == (p_pairs & q_pairs)


def test_is_congruence_matches_brute_force():
    for alg in (z_mod(4), semilattice2(), z_mod(3)):
        for labels in all_partition_labels(alg.size):
            ok, witness = is_congruence(alg, Partition(alg.size, labels))
            assert ok == brute_is_congruence(alg, labels)
            if not ok:
                # witness is a genuine violation
                name, args, other = witness
                sym_index = alg.signature.index(name)
                va = alg.apply(sym_index, args)
                vb = alg.apply(sym_index, other)
                assert all(labels[x] == labels[y] for x, y in zip(args, other))
                assert labels[va] != labels[vb]


def test_congruence_generated_is_smallest_containing_pair():
    z4 = z_mod(4)
    brute = [Partition(4, labels) for labels in brute_all_congruence_labels(z4)]
    for a, b in itertools.combinations(range(4), 2):
        got = congruence_generated(z4, [(a, b)])
        assert got.partition.related(a, b)
        assert is_congruence(z4, got.partition)[0]
        for cand in brute:
            if cand.related(a, b):
                assert refines(got.partition, cand)


def test_congruence_generated_z4_example():
    got = congruence_generated(z_mod(4), [(0, 2)])
    assert got.partition.class_of == (0, 1, 0, 1)


def test_all_congruences_matches_partition_filter():
    for alg in (z_mod(4), semilattice2(), z_mod(3), trivial(), z_mod(6)):
        got = sorted(c.partition.class_of for c in all_congruences(alg))
        expect = sorted(brute_all_congruence_labels(alg))
        assert got == expect


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.data())
def test_all_congruences_random_small_algebras(size, data):
    from psvar import FiniteAlgebra, Signature

    table = tuple(
        data.draw(st.integers(0, size - 1)) for _ in range(size * size)
    )
    alg = FiniteAlgebra(Signature((("f", 2),)), size, (table,))
    got = sorted(c.partition.class_of for c in all_congruences(alg))
    assert got == sorted(brute_all_congruence_labels(alg))


def test_meet_join_lattice_axioms_on_z6():
    z6 = z_mod(6)
    congs = all_congruences(z6)
    for a, b in itertools.product(congs, repeat=2):
        m = meet(a, b)
        j = join(a, b)
        assert refines(m.partition, a.partition) and refines(m.partition, b.partition)
        assert refines(a.partition, j.partition) and refines(b.partition, j.partition)
        assert meet(a, a).partition == a.partition
        assert join(a, a).partition == a.partition
        # meet is the coarsest common refinement, join the finest common
        # coarsening, within the congruence lattice
        for c in congs:
            if refines(c.partition, a.partition) and refines(c.partition, b.partition):
                assert refines(c.partition, m.partition)
            if refines(a.partition, c.partition) and refines(b.partition, c.partition):
                assert refines(j.partition, c.partition)


def test_quotient_algebra_z4():
    z4 = z_mod(4)
    theta = congruence_generated(z4, [(0, 2)])
    quot, hom = quotient_algebra(z4, theta)
    assert quot.size == 2
    assert hom.is_valid() and hom.is_surjective()
    # kernel of the quotient map is theta
    for a, b in itertools.product(range(4), repeat=2):
        assert (hom.map[a] == hom.map[b]) == theta.partition.related(a, b)
    # quotient is z2 up to the induced labeling
    assert quot.tables[0] == (0, 1, 1, 0)


def test_quotient_rejects_non_congruence_with_witness():
    sl = semilattice2()
    z3 = z_mod(3)
    bad = Partition(3, (0, 0, 1))
    assert not is_congruence(z3, bad)[0]
    with pytest.raises(NotACongruenceError) as exc:
        quotient_algebra(z3, Congruence(z3, bad))
    assert exc.value.witness is not None
    # full and identity partitions are always congruences
    quotient_algebra(sl, Congruence(sl, Partition(2, (0, 0))))
    quotient_algebra(sl, Congruence(sl, Partition(2, (0, 1))))


def test_meet_rejects_mismatched_algebras():
    with pytest.raises(Exception):
        meet(
            Congruence(z_mod(3), Partition(3, (0, 0, 0))),
            Congruence(z_mod(4), Partition(4, (0, 0, 0, 0))),
        )
