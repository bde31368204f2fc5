import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posdata.logic import (FALSE, TRUE, And, Const, ExistsFO, ExistsSO, ForallFO,
                           ForallSO, Less, Mem, Not, Or, Sim, automaton_to_mso,
                           eval_mso, first, format_formula, free_vars,
                           is_positive_formula, last, nnf, parse_formula,
                           phi_last_fresh, phi_no_singleton, phi_repeat, succ)
from posdata.core import SpecSyntaxError
from posdata.semantics import nofra_accepts, words

from fixtures import D, HAND, L1, corpus


def w(text):
    return tuple(text.split())


def test_phi1():
    assert eval_mso(phi_repeat(), w("a a"))
    assert not eval_mso(phi_repeat(), w("a b"))


def test_phi0():
    assert eval_mso(phi_last_fresh(), w("a b"))
    assert not eval_mso(phi_last_fresh(), w("a b a"))


def test_no_singleton():
    assert eval_mso(phi_no_singleton(), w("a b a b"))
    assert not eval_mso(phi_no_singleton(), w("a b c"))


def test_empty_word():
    assert not eval_mso(ExistsFO("x", TRUE), ())
    assert eval_mso(ForallFO("x", FALSE), ())
    assert eval_mso(ExistsSO("X", ForallFO("x", Not(Mem("X", "x")))), ())


def test_environment_and_unbound_variables():
    phi = And((Mem("X", "x"), Less("x", "y")))
    assert eval_mso(phi, w("a b c"), {"X": {1, 3}, "x": 1, "y": 2})
    assert not eval_mso(phi, w("a b c"), {"X": {3}, "x": 1, "y": 2})
    with pytest.raises(ValueError, match="unbound variable: y"):
        eval_mso(phi, w("a b"), {"X": set(), "x": 1})
    with pytest.raises(ValueError):
        eval_mso(Less("x", "x"), w("a"), {"x": 2})


def test_helpers():
    word = w("a b c")
    pairs = {(x, y) for x in (1, 2, 3) for y in (1, 2, 3)
             if eval_mso(succ("x", "y"), word, {"x": x, "y": y})}
    assert pairs == {(1, 2), (2, 3)}
    assert [p for p in (1, 2, 3) if eval_mso(first("x"), word, {"x": p})] == [1]
    assert [p for p in (1, 2, 3) if eval_mso(last("z"), word, {"z": p})] == [3]
    assert "z" not in free_vars(succ("x", "y"))
    assert free_vars(succ("y", "z")) == {"y", "z"}


def test_nnf_examples():
    a, b = Less("x", "y"), Sim("x", "y")
    assert nnf(Not(Or((a, b)))) == And((Not(a), Not(b)))
    assert nnf(Not(ExistsFO("x", a))) == ForallFO("x", Not(a))
    assert nnf(Not(Not(b))) == b
    assert nnf(Not(ForallSO("X", Mem("X", "x")))) == ExistsSO("X", Not(Mem("X", "x")))
    assert nnf(Not(TRUE)) == FALSE


def test_positivity_examples():
    assert is_positive_formula(phi_repeat())
    assert not is_positive_formula(phi_last_fresh())
    assert is_positive_formula(And((Sim("x", "y"), Not(Less("x", "y")))))
    assert is_positive_formula(Not(Not(Sim("x", "y"))))


# random formulas over free x, y and set X, closed or not
def formulas(depth):
    atoms = st.sampled_from([Less("x", "y"), Less("y", "x"), Sim("x", "y"),
                             Mem("X", "x"), Mem("X", "y"), TRUE, FALSE])
    if depth == 0:
        return atoms
    sub = formulas(depth - 1)
    return st.one_of(
        atoms,
        sub.map(Not),
        st.tuples(sub, sub).map(And),
        st.tuples(sub, sub).map(Or),
        sub.map(lambda f: ExistsFO("x", f)),
        sub.map(lambda f: ForallFO("y", f)),
        sub.map(lambda f: ExistsSO("X", f)),
        sub.map(lambda f: ForallSO("X", f)),
    )


def _envs(word):
    n = len(word)
    for x in range(1, n + 1):
        for y in range(1, n + 1):
            for mask in range(1 << n):
                yield {"x": x, "y": y, "X": {p for p in range(1, n + 1) if mask >> (p - 1) & 1}}


@settings(max_examples=150, deadline=None)
@given(formulas(4))
def test_nnf_preserves_meaning(phi):
    normal = nnf(phi)
    for word in words("ab", 3):
        for env in _envs(word):
            assert eval_mso(phi, word, env) == eval_mso(normal, word, env)


def _naive(phi, word, env):
    """Textbook two-valued evaluation, used to check the pruning search."""
    n = len(word)
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Less):
        return env[phi.left] < env[phi.right]
    if isinstance(phi, Sim):
        return word[env[phi.left] - 1] == word[env[phi.right] - 1]
    if isinstance(phi, Mem):
        return env[phi.var] in env[phi.set_var]
    if isinstance(phi, Not):
        return not _naive(phi.arg, word, env)
    if isinstance(phi, And):
        return all(_naive(p, word, env) for p in phi.parts)
    if isinstance(phi, Or):
        return any(_naive(p, word, env) for p in phi.parts)
    if isinstance(phi, (ExistsFO, ForallFO)):
        values = range(1, n + 1)
    else:
        values = [{p for p in range(1, n + 1) if mask >> (p - 1) & 1} for mask in range(1 << n)]
    results = (_naive(phi.body, word, {**env, phi.var: v}) for v in values)
    return any(results) if isinstance(phi, (ExistsFO, ExistsSO)) else all(results)


@settings(max_examples=150, deadline=None)
@given(formulas(4))
def test_search_matches_naive_evaluation(phi):
    for word in words("ab", 3):
        for env in _envs(word):
            assert eval_mso(phi, word, env) == _naive(phi, word, env)


@settings(max_examples=60, deadline=None)
@given(formulas(3))
def test_positive_sentences_define_positive_languages(phi):
    phi = ExistsFO("x", ForallFO("y", ExistsSO("X", phi)))
    if not is_positive_formula(phi):
        return
    atoms = "abc"
    for word in words(atoms, 3):
        if not eval_mso(phi, word):
            continue
        dom = sorted(set(word))
        for image in itertools.product(atoms, repeat=len(dom)):
            rho = dict(zip(dom, image))
            assert eval_mso(phi, tuple(rho[a] for a in word))


def test_generated_sentence_for_d():
    phi = automaton_to_mso(D)
    assert eval_mso(phi, w("a a"))
    assert not eval_mso(phi, w("a b c"))
    assert not eval_mso(phi, ())
    outer = []
    f = phi.parts[0] if isinstance(phi, And) else phi
    while isinstance(f, ExistsSO):
        outer.append(f.var)
        f = f.body
    assert outer == [f"R{i}" for i in range(1, len(D.transitions) + 1)]


def test_generated_sentence_is_positive_and_deterministic():
    phi = automaton_to_mso(L1)
    assert is_positive_formula(phi)
    assert format_formula(phi) == format_formula(automaton_to_mso(L1))
    assert not free_vars(phi)


@pytest.mark.parametrize("n", HAND, ids=lambda n: "-".join(sorted(n.states)))
def test_generated_sentence_matches_closure_on_hand_fixtures(n):
    phi = automaton_to_mso(n)
    for word in words(range(3), 3):
        assert eval_mso(phi, word) == nofra_accepts(n, word), word


def test_parse_examples():
    assert parse_formula("exists x. exists y. x < y & x ~ y") == phi_repeat()
    assert parse_formula("forall X. X(x) | !X(y)") == ForallSO(
        "X", Or((Mem("X", "x"), Not(Mem("X", "y")))))
    assert parse_formula("(true) & false") == And((TRUE, FALSE))
    # maximal scope
    assert parse_formula("x < y & exists z. z ~ x | z < y") == And((
        Less("x", "y"), ExistsFO("z", Or((Sim("z", "x"), Less("z", "y"))))))


@pytest.mark.parametrize("text", ["x <", "X < y", "x(y)", "exists . x < x", "x < y )",
                                  "exists x x < x", "x $ y"])
def test_parse_errors(text):
    with pytest.raises(SpecSyntaxError):
        parse_formula(text)


def test_parse_error_position():
    with pytest.raises(SpecSyntaxError) as info:
        parse_formula("x < y &\n  x $ y")
    assert (info.value.line, info.value.col) == (2, 5)


@settings(max_examples=200, deadline=None)
@given(formulas(5))
def test_print_parse_round_trip(phi):
    assert parse_formula(format_formula(phi)) == phi


def test_round_trip_generated_sentences():
    for n in HAND + corpus(10, seed=4, max_states=2, max_registers=1, max_transitions=4):
        phi = automaton_to_mso(n)
        assert parse_formula(format_formula(phi)) == phi
