import random

from posdata.core import validate_automaton
from posdata.oracle import (bounded_equiv, bounded_positivity_check,
                            closure_oracle, enumerate_runs_membership,
                            random_nofa, refinements, set_partitions)
from posdata.semantics import nofa_accepts, words
from posdata.transforms import positive_closure, to_fsuba, rigidify

from fixtures import D, FSUBA_L1, L1, STORE_MATCH, corpus


def test_set_partitions_are_bell_numbers():
    assert [len(list(set_partitions(n))) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_refinements():
    assert sorted(refinements((5, 5))) == [(0, 0), (0, 1)]
    assert list(refinements((5, 6))) == [(0, 1)]


def test_run_oracle_examples():
    assert enumerate_runs_membership(D, (0, 1), 2)
    assert not enumerate_runs_membership(D, (0, 0), 4)


def test_run_oracle_monotone_in_pool():
    for n in corpus(15, seed=21):
        for w in words(range(2), 3):
            found = [enumerate_runs_membership(n, w, p) for p in range(5)]
            assert found == sorted(found)


def test_run_oracle_other_kinds():
    assert enumerate_runs_membership(FSUBA_L1, (0, 1, 0), 0)
    assert not enumerate_runs_membership(FSUBA_L1, (0, 1), 0)
    assert enumerate_runs_membership(STORE_MATCH, (3, 3), 0)
    assert not enumerate_runs_membership(STORE_MATCH, (3, 4), 2)


def test_closure_oracle_examples():
    assert closure_oracle(D, (0, 0))
    assert closure_oracle(D, (0, 1))
    assert not closure_oracle(L1, (0, 1))


def test_closure_oracle_contains_the_language():
    for n in corpus(20, seed=22):
        for w in words(range(3), 3):
            if enumerate_runs_membership(n, w, 2 * n.registers):
                assert closure_oracle(n, w)


def test_closure_oracle_is_plain_membership_on_positive_languages():
    for n in corpus(30, seed=23):
        if bounded_positivity_check(n, range(3), 3) is not None:
            continue
        for w in words(range(3), 3):
            assert closure_oracle(n, w) == nofa_accepts(n, w)


def test_bounded_equiv():
    assert bounded_equiv(D, positive_closure(D), "ab", 2) == ("a", "a")
    assert bounded_equiv(L1, L1, "abc", 3) is None
    assert bounded_equiv(L1, to_fsuba(rigidify(L1)), "abc", 4) is None


def test_bounded_equiv_symmetric():
    ns = corpus(10, seed=24)
    for a, b in zip(ns, ns[1:]):
        assert bounded_equiv(a, b, range(2), 3) == bounded_equiv(b, a, range(2), 3)


def test_positivity_check():
    assert bounded_positivity_check(positive_closure(D), "ab", 3) is None
    assert bounded_positivity_check(D, "ab", 2) == (("a", "b"), {"a": "a", "b": "a"})
    assert bounded_positivity_check(FSUBA_L1, "ab", 3) is None


def test_random_automata_are_valid():
    rng = random.Random(0)
    for _ in range(100):
        n = random_nofa(rng)
        assert validate_automaton(n) == []
        assert len(n.states) <= 3 and n.registers <= 2 and len(n.transitions) <= 6
