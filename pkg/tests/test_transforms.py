import logging
import math

import pytest

from posdata.core import (CONSISTENCY, EXACT, IN_REG, REG_REG, Nofa, is_rigid,
                          parse_equations, validate_automaton)
from posdata.oracle import bounded_equiv
from posdata.semantics import (fsuba_accepts, fsuba_step, nofra_accepts,
                               regaut_accepts, tracked_reachable, words)
from posdata.transforms import (AFTER, BEFORE, INPUT, BAnd, BEq, BNot, BTrue,
                                Slot, deguess, eval_guard, format_guard,
                                guard_has_negation, positive_closure, rigidify,
                                to_fsuba, to_positive_regaut, validate_fsuba,
                                validate_regaut, validate_tracked)

from fixtures import D, G, L1, SWAP, STORE_MATCH, corpus


def test_positive_closure_retags():
    c = positive_closure(D)
    assert c.semantics == CONSISTENCY and D.semantics == EXACT
    assert c.transitions == D.transitions
    assert nofra_accepts(c, ("a", "a"))


def test_deguess_tracks_registers():
    t = deguess(L1)
    assert validate_tracked(t) == []
    assert ("s", frozenset()) in t.initial
    for tr in t.transitions:
        expected = {e.left for e in tr.eqs if e.kind == IN_REG} | {
            e.right for e in tr.eqs if e.kind == REG_REG and e.left in tr.src[1]}
        assert tr.dst[1] == expected


def test_deguess_only_reachable_controls():
    t = deguess(G)
    assert t.controls == {("g0", frozenset()), ("g1", frozenset()), ("g2", frozenset())}


def test_deguess_values_are_past_inputs():
    t = deguess(L1)
    for word in words(range(3), 4):
        for r, layer in enumerate(tracked_reachable(t, word)):
            for _, val in layer:
                assert {v for _, v in val} <= set(word[:r])


def test_rigidify_swap():
    r = rigidify(SWAP)
    assert ("j@1.2", parse_equations("1=1, 2=2"), "k@2.1") in {
        (t.src, t.eqs, t.dst) for t in r.transitions}
    assert is_rigid(r)
    assert len(r.states) == len(SWAP.states) * math.factorial(2)
    assert r.initial == {"j@1.2"}
    assert r.final == {"k@1.2", "k@2.1"}


def test_rigidify_unconstrained_targets_take_every_permutation():
    n = Nofa([], 2, [("j", "1=1", "k")], ["j"], ["k"])
    r = rigidify(n)
    # pi(1) is fixed, pi'(2) must then be the other index
    assert len(r.transitions) == 2


def test_rigidify_preserves_language_on_fixtures():
    for n in (D, L1, G, SWAP):
        assert bounded_equiv(n, rigidify(n), range(3), 4) is None
        assert validate_automaton(rigidify(n)) == []


def test_rigidify_warns_for_many_registers(caplog):
    n = Nofa([], 5, [], ["s"], ["s"])
    with caplog.at_level(logging.WARNING):
        r = rigidify(n)
    assert "permutations" in caplog.text
    assert len(r.states) == 120


def test_to_fsuba_l1():
    f = to_fsuba(rigidify(L1))
    assert validate_fsuba(f) == []
    assert f.registers == L1.registers + 1
    assert fsuba_accepts(f, ("a", "a"))
    assert not fsuba_accepts(f, ("a", "b"))
    assert bounded_equiv(f, positive_closure(L1), "abc", 4) is None


def test_to_fsuba_needs_rigid_input():
    with pytest.raises(ValueError):
        to_fsuba(SWAP)


def test_to_fsuba_start_state():
    eps = Nofa([], 0, [("s", "", "s")], ["s"], ["s"])
    f = to_fsuba(eps)
    assert "q0" in f.final
    assert fsuba_accepts(f, ())
    assert f.registers == 1
    assert "q0" not in to_fsuba(rigidify(L1)).final


def test_fsuba_guard_reading_loses_words():
    # registers in T read as an emptiness guard (left empty) instead of
    # being emptied by the move: the construction then rejects "a a b"
    def guard_step(tr, regs, a):
        if any(regs[j - 1] is not None for j in tr.erase):
            return None
        return fsuba_step(tr, regs, a)

    f = to_fsuba(rigidify(L1))
    word = (0, 0, 1)
    layer = {(f.initial, (None,) * f.registers)}
    for a in word:
        layer = {(t.dst, new) for q, regs in layer for t in f.transitions
                 if t.src == q and (new := guard_step(t, regs, a)) is not None}
    assert not any(q in f.final for q, _ in layer)
    assert fsuba_accepts(f, word) and nofra_accepts(L1, word)


def test_regaut_is_positive():
    r = to_positive_regaut(L1)
    assert validate_regaut(r) == []
    assert r.is_positive()
    assert r.initial == {"start"}
    assert "start" not in r.final


def test_regaut_empty_conjunction_is_true():
    r = to_positive_regaut(D)
    guards = {(t.src, t.dst): t.guard for t in r.transitions}
    assert guards[("s1", "f")] == BTrue()


def test_regaut_start_copies_initial_stores():
    r = to_positive_regaut(L1)
    starts = sorted((t.dst, format_guard(t.guard)) for t in r.transitions if t.src == "start")
    assert starts == [("h", ".=(1,a)"), ("s", "true")]


def test_regaut_fresh_start_label():
    n = Nofa([], 0, [("start", "", "start")], ["start"], ["start"])
    r = to_positive_regaut(n)
    assert r.initial == {"start'"}
    assert "start'" in r.final


def test_guard_evaluation():
    eq = BEq(Slot(BEFORE, 1), Slot(INPUT))
    assert eval_guard(eq, (3,), 3, (None,))
    assert not eval_guard(eq, (None,), 3, (None,))
    assert eval_guard(BNot(eq), (None,), 3, (None,))
    both = BAnd((eq, BEq(Slot(INPUT), Slot(AFTER, 1))))
    assert eval_guard(both, (3,), 3, (3,))
    assert guard_has_negation(BAnd((eq, BNot(eq))))
    assert format_guard(both) == "(1,b)=. & .=(1,a)"


def test_store_then_match_is_positive():
    assert STORE_MATCH.is_positive()
    assert regaut_accepts(STORE_MATCH, ("x", "x"))


@pytest.mark.parametrize("n", corpus(15, seed=77), ids=lambda n: f"m{n.registers}")
def test_chain_on_small_corpus(n):
    closure = positive_closure(n)
    assert bounded_equiv(closure, deguess(n), range(3), 3) is None
    assert bounded_equiv(n, rigidify(n), range(3), 3) is None
    assert bounded_equiv(closure, to_fsuba(rigidify(n)), range(3), 3) is None
    assert bounded_equiv(closure, to_positive_regaut(n), range(3), 3) is None


def test_outputs_validate():
    for n in corpus(20, seed=13):
        assert validate_tracked(deguess(n)) == []
        assert validate_automaton(rigidify(n)) == []
        assert validate_fsuba(to_fsuba(rigidify(n))) == []
        assert validate_regaut(to_positive_regaut(n)) == []


def test_closure_is_idempotent_on_positive_languages():
    # L1 is renaming closed, so its closure adds nothing
    assert bounded_equiv(L1, positive_closure(L1), range(3), 4) is None
    assert bounded_equiv(D, positive_closure(D), "ab", 2) == ("a", "a")
