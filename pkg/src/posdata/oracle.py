"""Brute-force references for testing the engines and the constructions.

:func:`enumerate_runs_membership` never canonicalizes: it tracks, for every
control state, the set of all register words over ``names(w)`` plus ``pool``
fresh atoms (and the empty value where the kind has one) that some run
reaches, one step at a time, using numpy boolean matrices.
"""
from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import (EXACT, IN_REG, REG_IN, REG_REG, Nofa, Transition,
                   induced_abstraction, names_of)
from .semantics import accepts, words
from .transforms import (BEFORE, INPUT, BAnd, BEq, BNot, BOr, BTrue,
                         Fsuba, RegisterAutomaton, TrackedNofra)

BOT = -1


class _Grid:
    """All register words of length ``m`` over ``values`` as a matrix."""

    def __init__(self, m, values):
        self.m = m
        self.values = tuple(values)
        rows = list(itertools.product(self.values, repeat=m))
        self.words = np.array(rows, dtype=np.int64).reshape(len(rows), m)
        self.size = len(rows)
        self.distinct = np.array([len(set(r)) == m for r in rows], dtype=bool)
        self.index = {r: i for i, r in enumerate(rows)}
        # pairwise views: before varies along axis 0, after along axis 1
        self.before = self.words[:, None, :]
        self.after = self.words[None, :, :]

    def col_before(self, k):
        return self.words[:, k - 1][:, None]

    def col_after(self, k):
        return self.words[:, k - 1][None, :]


def _exact_relation(g: _Grid, eqs, b):
    m = g.m
    flat = _flat(eqs)
    rel = g.distinct[:, None] & g.distinct[None, :]
    for k in range(1, m + 1):
        rel = rel & ((g.col_before(k) == b) == ((REG_IN, k) in flat))
        rel = rel & ((g.col_after(k) == b) == ((IN_REG, k) in flat))
        for kb in range(1, m + 1):
            rel = rel & ((g.col_before(k) == g.col_after(kb)) == ((REG_REG, k, kb) in flat))
    return rel


def _flat(eqs):
    out = set()
    for e in eqs:
        out.add((e.kind, e.left) if e.kind != REG_REG else (e.kind, e.left, e.right))
    return out


def _consistent_relation(g: _Grid, eqs, b):
    rel = np.ones((g.size, g.size), dtype=bool)
    for e in eqs:
        if e.kind == REG_IN:
            rel &= g.col_before(e.left) == b
        elif e.kind == IN_REG:
            rel &= g.col_after(e.left) == b
        else:
            rel &= g.col_before(e.left) == g.col_after(e.right)
    return rel


def _tracked_relation(g: _Grid, t, b):
    regs, regs2 = t.src[1], t.dst[1]
    rel = np.ones((g.size, g.size), dtype=bool)
    for k in range(1, g.m + 1):
        if k not in regs:
            rel &= g.col_before(k) == BOT
        if k not in regs2:
            rel &= g.col_after(k) == BOT
    for e in t.eqs:
        if e.kind == REG_IN and e.left in regs:
            rel &= g.col_before(e.left) == b
        elif e.kind == IN_REG:
            rel &= g.col_after(e.left) == b
        elif e.kind == REG_REG and e.left in regs:
            rel &= g.col_before(e.left) == g.col_after(e.right)
    return rel


def _fsuba_relation(g: _Grid, t, b):
    k = t.register
    before_k = g.col_before(k)
    rel = (before_k == BOT) | (before_k == b)
    rel = np.broadcast_to(rel, (g.size, g.size)).copy()
    for j in range(1, g.m + 1):
        if j in t.erase:
            rel &= g.col_after(j) == BOT
        elif j == k:
            rel &= g.col_after(j) == b
        else:
            rel &= g.col_before(j) == g.col_after(j)
    return rel


def _guard_matrix(g: _Grid, guard, b):
    if isinstance(guard, BTrue):
        return np.ones((g.size, g.size), dtype=bool)
    if isinstance(guard, BEq):
        x, y = _slot_matrix(g, guard.left, b), _slot_matrix(g, guard.right, b)
        out = (x == y) & (x != BOT) & (y != BOT)
        return np.broadcast_to(out, (g.size, g.size))
    if isinstance(guard, BNot):
        return ~_guard_matrix(g, guard.arg, b)
    parts = [_guard_matrix(g, p, b) for p in guard.parts]
    if isinstance(guard, BAnd):
        return np.logical_and.reduce(parts)
    if isinstance(guard, BOr):
        return np.logical_or.reduce(parts)
    raise TypeError(f"not a guard: {guard!r}")


def _slot_matrix(g, slot, b):
    if slot.side == INPUT:
        return np.array([[b]])
    if slot.side == BEFORE:
        return g.col_before(slot.index)
    return g.col_after(slot.index)


def _universe(w, pool):
    names = sorted(set(w))
    start = max(names) + 1 if names else 0
    return names, list(range(start, start + pool))


def _search(m, values, states, initial_rows, final, steps, w):
    """Forward reachability of (state, register word) pairs.

    ``initial_rows`` maps a state to a boolean row mask; ``steps(b)`` lists
    ``(src, relation, dst)`` triples.
    """
    g = _Grid(m, values)
    masks = {s: initial_rows(g).get(s, np.zeros(g.size, dtype=bool)) for s in states}
    for b in w:
        nxt = {s: np.zeros(g.size, dtype=bool) for s in states}
        for src, relfn, dst in steps:
            row = masks[src]
            if not row.any():
                continue
            rel = relfn(g, b)
            nxt[dst] = nxt[dst] | (row[:, None] & rel).any(axis=0)
        masks = nxt
    return any(masks[s].any() for s in final)


def enumerate_runs_membership(machine, w: Sequence, pool: int) -> bool:
    """Exhaustive run search with register values from ``names(w)`` and
    ``pool`` fresh atoms.  Words must consist of naturals."""
    w = tuple(w)
    if pool < 0:
        raise ValueError("pool must be non-negative")
    names, fresh = _universe(w, pool)
    if isinstance(machine, Nofa):
        m = machine.registers
        exact = machine.semantics == EXACT
        relation = _exact_relation if exact else _consistent_relation

        def initial(g):
            row = g.distinct if exact else np.ones(g.size, dtype=bool)
            return {j: row for j in machine.initial}
        steps = [(t.src, (lambda g, b, t=t: relation(g, t.eqs, b)), t.dst)
                 for t in machine.sorted_transitions()]
        return _search(m, names + fresh, machine.states, initial, machine.final, steps, w)
    if isinstance(machine, TrackedNofra):
        m = machine.registers

        def initial(g):
            row = np.all(g.words == BOT, axis=1)
            return {c: row for c in machine.initial}
        steps = [(t.src, (lambda g, b, t=t: _tracked_relation(g, t, b)), t.dst)
                 for t in sorted(machine.transitions)]
        return _search(m, [BOT] + names + fresh, machine.controls, initial,
                       machine.final, steps, w)
    if isinstance(machine, Fsuba):
        m = machine.registers

        def initial(g):
            return {machine.initial: np.all(g.words == BOT, axis=1)}
        steps = [(t.src, (lambda g, b, t=t: _fsuba_relation(g, t, b)), t.dst)
                 for t in sorted(machine.transitions)]
        return _search(m, [BOT] + names + fresh, machine.states, initial,
                       machine.final, steps, w)
    if isinstance(machine, RegisterAutomaton):
        m = machine.registers

        def initial(g):
            row = np.all(g.words == BOT, axis=1)
            return {c: row for c in machine.initial}
        steps = [(t.src, (lambda g, b, t=t: _guard_matrix(g, t.guard, b)), t.dst)
                 for t in sorted(machine.transitions)]
        return _search(m, [BOT] + names + fresh, machine.states, initial,
                       machine.final, steps, w)
    raise TypeError(f"no run oracle for {type(machine).__name__}")


# -- closure oracle ------------------------------------------------------------------

def set_partitions(n: int):
    """Restricted growth strings of length ``n``: block ids of positions."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(top + 1):
            yield from rec(prefix + [c], max(top, c + 1))

    yield from rec([], 0)


def refinements(w: Sequence):
    """Canonical words ``u`` whose kernel refines the kernel of ``w``."""
    for rgs in set_partitions(len(w)):
        rep = {}
        if all(rep.setdefault(c, a) == a for c, a in zip(rgs, w)):
            yield rgs


@lru_cache(maxsize=65536)
def _exact_member(n: Nofa, u: tuple) -> bool:
    exact = n if n.semantics == EXACT else Nofa(
        n.states, n.registers, n.transitions, n.initial, n.final, EXACT)
    return enumerate_runs_membership(exact, u, 2 * n.registers)


def closure_oracle(n: Nofa, w: Sequence) -> bool:
    """Is ``w`` a renaming image of a word accepted under exact semantics?"""
    return any(_exact_member(n, u) for u in refinements(tuple(w)))


# -- bounded comparisons ------------------------------------------------------------------

def bounded_equiv(m1, m2, atoms: Sequence, max_len: int, member1=None, member2=None):
    """``None`` when both accept the same words up to ``max_len``, else the
    length-lex least word on which they differ."""
    f1 = member1 or (lambda w: accepts(m1, w))
    f2 = member2 or (lambda w: accepts(m2, w))
    for w in words(atoms, max_len):
        if f1(w) != f2(w):
            return w
    return None


def bounded_positivity_check(machine, atoms: Sequence, max_len: int, member=None):
    """``None`` when every renaming of every accepted word is accepted, else
    the first ``(w, rho)`` that escapes the language."""
    f = member or (lambda w: accepts(machine, w))
    atoms = list(atoms)
    for w in words(atoms, max_len):
        if not f(w):
            continue
        dom = names_of(w)
        for image in itertools.product(atoms, repeat=len(dom)):
            rho = dict(zip(dom, image))
            if not f(tuple(rho[a] for a in w)):
                return w, rho
    return None


# -- random automata ------------------------------------------------------------------------

def random_equations(rng: random.Random, m: int) -> frozenset:
    """Abstraction of a random concrete step between distinct-register words."""
    span = 2 * m + 1
    p = rng.sample(range(span), m)
    q = rng.sample(range(span), m)
    return induced_abstraction(p, rng.randrange(span), q)


def random_nofa(rng: random.Random, max_states: int = 3, max_registers: int = 2,
                max_transitions: int = 6, semantics: str = EXACT) -> Nofa:
    k = rng.randint(1, max_states)
    states = [f"j{i}" for i in range(k)]
    m = rng.randint(0, max_registers)
    trans = {Transition(rng.choice(states), random_equations(rng, m), rng.choice(states))
             for _ in range(rng.randint(1, max_transitions))}
    initial = {states[0]} | {s for s in states[1:] if rng.random() < 0.2}
    final = {s for s in states if rng.random() < 0.5} or {rng.choice(states)}
    return Nofa(states, m, trans, initial, final, semantics)
