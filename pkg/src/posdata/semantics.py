"""Membership engines for every automaton kind.

All engines are equivariant: a word is first renamed to its canonical form
(letters become ``0, 1, ...`` in order of first appearance) and fresh atoms
are drawn from a pool of naturals above those.  Configurations that hold
fresh atoms are canonicalized after every step by renaming the live fresh
atoms to the least pool atoms, in register order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .core import (CONSISTENCY, EXACT, IN_REG, REG_IN, REG_REG, Nofa,
                   _abstraction, is_consistent, restrict)
from .transforms import (Fsuba, RegisterAutomaton, TrackedNofra, eval_guard)


def canonical_word(w: Sequence) -> tuple:
    """Rename letters to ``0, 1, ...`` in order of first appearance."""
    ids = {}
    return tuple(ids.setdefault(a, len(ids)) for a in w)


# -- abstract runs -------------------------------------------------------------

@dataclass(frozen=True)
class AbstractRun:
    controls: tuple
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "steps", tuple(frozenset(s) for s in self.steps))
        if len(self.controls) != len(self.steps) + 1:
            raise ValueError("an abstract run has one more control than steps")

    def __len__(self):
        return len(self.steps)


def run_predicates(run) -> frozenset:
    """All triples ``(i, k, r)`` such that register ``k`` at position ``r``
    holds the letter read at position ``i`` (positions are 1-based)."""
    steps = run.steps if isinstance(run, AbstractRun) else tuple(run)
    holds = set()
    live = {}  # k -> positions i with (i, k, r) at the current r
    for r, eqs in enumerate(steps, 1):
        nxt = {}
        for e in eqs:
            if e.kind == IN_REG:
                nxt.setdefault(e.left, set()).add(r)
            elif e.kind == REG_REG and e.left in live:
                nxt.setdefault(e.right, set()).update(live[e.left])
        live = nxt
        holds.update((i, k, r) for k, pos in live.items() for i in pos)
    return frozenset(holds)


def run_condition_holds(run, w: Sequence) -> bool:
    """Check ``b_i = b_(r+1)`` whenever ``k=.`` is in ``E_(r+1)`` and
    register ``k`` carries position ``i`` at ``r``."""
    table = run_predicates(run)
    steps = run.steps if isinstance(run, AbstractRun) else tuple(run)
    for i, k, r in table:
        if r < len(steps) and any(e.kind == REG_IN and e.left == k for e in steps[r]):
            if w[i - 1] != w[r]:
                return False
    return True


def abstract_runs(n: Nofa, length: int):
    """Every abstract run of ``n`` with ``length`` steps (exponential)."""
    out = n.outgoing()

    def extend(controls, steps):
        if len(steps) == length:
            yield AbstractRun(controls, steps)
            return
        for t in out.get(controls[-1], ()):
            yield from extend(controls + (t.dst,), steps + (t.eqs,))

    for j in sorted(n.initial):
        yield from extend((j,), ())


def nofra_accepts(n: Nofa, w: Sequence) -> bool:
    """Membership in the positive closure, via accepting abstract runs.

    The semantics tag of ``n`` is ignored.  The search state at position
    ``r`` is the control and, per register, the positions whose letter the
    register carries.
    """
    return _nofra_accepts(n, canonical_word(w))


@lru_cache(maxsize=65536)
def _nofra_accepts(n: Nofa, w: tuple) -> bool:
    m = n.registers
    out = n.outgoing()
    empty = (frozenset(),) * m
    layer = {(j, empty) for j in n.initial}
    for r, b in enumerate(w, 1):
        nxt = set()
        for j, held in layer:
            for t in out.get(j, ()):
                ok = True
                for e in t.eqs:
                    if e.kind == REG_IN and any(w[i - 1] != b for i in held[e.left - 1]):
                        ok = False
                        break
                if not ok:
                    continue
                new = [frozenset()] * m
                for e in t.eqs:
                    if e.kind == IN_REG:
                        new[e.left - 1] = new[e.left - 1] | {r}
                    elif e.kind == REG_REG:
                        new[e.right - 1] = new[e.right - 1] | held[e.left - 1]
                nxt.add((t.dst, tuple(new)))
        layer = nxt
        if not layer:
            return False
    return any(j in n.final for j, _ in layer)


# -- pattern engine for concrete simulations -------------------------------------

def _before_pattern(regs, b):
    """Classes: 0 is the input, then register values in order; -1 is empty."""
    cls = {b: 0}
    pat = tuple(-1 if v is None else cls.setdefault(v, len(cls)) for v in regs)
    return pat, cls


def _after_patterns(m, ncls, allow_bottom, distinct):
    """Restricted-growth fillings of ``m`` after-slots.

    Each slot is -1 (empty), an existing class ``< ncls`` or a new class,
    new classes being numbered in order of first use.
    """
    def rec(prefix, top):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        options = ([-1] if allow_bottom else []) + list(range(top + 1))
        for c in options:
            if distinct and c >= 0 and c in prefix:
                continue
            yield from rec(prefix + [c], max(top, c + 1) if c == top else top)

    yield from rec([], ncls)


class _Engine:
    """Breadth-first simulation over canonical configurations.

    ``steps(j)`` lists ``(pred, dst)`` pairs where ``pred(before, a, after)``
    decides a step on representative integer patterns.
    """

    def __init__(self, m, steps, allow_bottom, distinct):
        self.m = m
        self.steps = steps
        self.allow_bottom = allow_bottom
        self.distinct = distinct
        self._cache = {}

    def successors_pattern(self, j, bpat):
        key = (j, bpat)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        ncls = max(bpat, default=0) + 1
        before = tuple(None if c < 0 else c for c in bpat)
        result = []
        for apat in _after_patterns(self.m, max(ncls, 1), self.allow_bottom, self.distinct):
            after = tuple(None if c < 0 else c for c in apat)
            for pred, dst in self.steps(j):
                if pred(before, 0, after):
                    result.append((apat, dst))
        self._cache[key] = result
        return result

    def step(self, config, b, names, pool):
        j, regs = config
        bpat, cls = _before_pattern(regs, b)
        values = [None] * len(cls)
        for v, c in cls.items():
            values[c] = v
        taken = set(cls)
        for apat, dst in self.successors_pattern(j, bpat):
            new = sorted({c for c in apat if c >= len(cls)})
            if not new:
                yield dst, tuple(None if c < 0 else values[c] for c in apat)
                continue
            free_names = [x for x in names if x not in taken]
            free_pool = [x for x in pool if x not in taken]
            for choice in _injections(len(new), free_names, free_pool):
                assign = dict(zip(new, choice))
                yield dst, tuple(None if c < 0 else
                                 values[c] if c < len(cls) else assign[c] for c in apat)


def _injections(t, names, pool):
    """Ways to give ``t`` new classes distinct values: any unused name, or
    the next unused pool atom (all fresh choices are equivalent)."""
    def rec(i, used, fresh_next, acc):
        if i == t:
            yield tuple(acc)
            return
        for x in names:
            if x not in used:
                yield from rec(i + 1, used | {x}, fresh_next, acc + [x])
        if fresh_next < len(pool):
            yield from rec(i + 1, used, fresh_next + 1, acc + [pool[fresh_next]])

    yield from rec(0, frozenset(), 0, [])


def canonical_config(regs, names, pool):
    """Rename pool atoms in ``regs`` to the least pool atoms, in order."""
    ren = {}
    out = []
    for v in regs:
        if v is None or v in names:
            out.append(v)
        else:
            if v not in ren:
                ren[v] = pool[len(ren)]
            out.append(ren[v])
    return tuple(out)


def _simulate(engine, initial, final, w, pool_size):
    names = frozenset(w)
    pool = tuple(range(len(names), len(names) + pool_size))
    layer = {(j, canonical_config(q, names, pool)) for j, q in initial(sorted(names), pool)}
    for b in w:
        nxt = set()
        for config in layer:
            for dst, regs in engine.step(config, b, names, pool):
                nxt.add((dst, canonical_config(regs, names, pool)))
        layer = nxt
        if not layer:
            return False
    return any(j in final for j, _ in layer)


def _distinct_words(m, names, pool):
    """Distinct register words over ``names`` and fresh atoms, up to
    renaming of the fresh atoms."""
    def rec(prefix, fresh):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for x in names:
            if x not in prefix:
                yield from rec(prefix + [x], fresh)
        if fresh < len(pool):
            yield from rec(prefix + [pool[fresh]], fresh + 1)

    yield from rec([], 0)


def _any_words(m, names, pool):
    def rec(prefix, fresh):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for x in list(names) + list(pool[:fresh]):
            yield from rec(prefix + [x], fresh)
        if fresh < len(pool):
            yield from rec(prefix + [pool[fresh]], fresh + 1)

    yield from rec([], 0)


@lru_cache(maxsize=512)
def _nofa_engine(n: Nofa) -> _Engine:
    out = n.outgoing()
    exact = n.semantics == EXACT
    table = {}
    for j, ts in out.items():
        if exact:
            table[j] = [((lambda p, a, q, E=t.eqs: _abstraction(p, a, q) == E), t.dst)
                        for t in ts]
        else:
            table[j] = [((lambda p, a, q, E=t.eqs: is_consistent(p, a, q, E)), t.dst)
                        for t in ts]
    return _Engine(n.registers, lambda j: table.get(j, ()), False, exact)


def default_pool(m: int) -> int:
    return 2 * m


def nofa_accepts(n: Nofa, w: Sequence, pool: int | None = None) -> bool:
    """Exact-pattern membership: some run over distinct register words."""
    if n.semantics != EXACT:
        raise ValueError("nofa_accepts needs exact semantics; use nofra_accepts "
                         "for the consistency reading")
    return _nofa_accepts(n, canonical_word(w), default_pool(n.registers) if pool is None else pool)


@lru_cache(maxsize=65536)
def _nofa_accepts(n, w, pool):
    if not w:
        return bool(n.initial & n.final)
    engine = _nofa_engine(n)
    init = lambda names, pl: [(j, q) for j in n.initial
                              for q in _distinct_words(n.registers, names, pl)]
    return _simulate(engine, init, n.final, w, pool)


def nofra_accepts_concrete(n: Nofa, w: Sequence, pool: int | None = None) -> bool:
    """Consistency-semantics membership by concrete simulation over ``A^m``."""
    closed = n if n.semantics == CONSISTENCY else Nofa(
        n.states, n.registers, n.transitions, n.initial, n.final, CONSISTENCY)
    return _nofra_concrete(closed, canonical_word(w),
                           default_pool(n.registers) if pool is None else pool)


@lru_cache(maxsize=65536)
def _nofra_concrete(n, w, pool):
    if not w:
        return bool(n.initial & n.final)
    engine = _nofa_engine(n)
    init = lambda names, pl: [(j, q) for j in n.initial
                              for q in _any_words(n.registers, names, pl)]
    return _simulate(engine, init, n.final, w, pool)


# -- tracked automata ------------------------------------------------------------------

def tracked_step(t, valuation: dict, b) -> dict | None:
    """Apply a tracked transition to ``valuation`` (register -> atom on S)."""
    regs = t.src[1]
    if set(valuation) != set(regs):
        raise ValueError("valuation domain differs from the tracked register set")
    for e in restrict(t.eqs, regs):
        if e.kind == REG_IN and valuation[e.left] != b:
            return None
    new = {}
    for e in t.eqs:
        if e.kind == IN_REG:
            new[e.left] = b
        elif e.kind == REG_REG and e.left in regs:
            new[e.right] = valuation[e.left]
    return new


def _freeze(valuation):
    return tuple(sorted(valuation.items()))


def tracked_reachable(t: TrackedNofra, w: Sequence):
    """Layers of reachable configurations ``((j, S), valuation)``, one per
    prefix length."""
    out = {}
    for tr in sorted(t.transitions):
        out.setdefault(tr.src, []).append(tr)
    layer = {(c, ()) for c in t.initial}
    layers = [layer]
    for b in w:
        nxt = set()
        for control, val in layer:
            for tr in out.get(control, ()):
                new = tracked_step(tr, dict(val), b)
                if new is not None:
                    nxt.add((tr.dst, _freeze(new)))
        layer = nxt
        layers.append(layer)
    return layers


def tracked_accepts(t: TrackedNofra, w: Sequence) -> bool:
    return _tracked_accepts(t, canonical_word(w))


@lru_cache(maxsize=65536)
def _tracked_accepts(t, w):
    last = tracked_reachable(t, w)[-1]
    return any(c in t.final for c, _ in last)


# -- FSUBA -------------------------------------------------------------------------------

def fsuba_step(tr, regs: tuple, a):
    """Successor registers after reading ``a`` via ``tr``, or ``None``.

    Register ``k`` must be empty or hold ``a``; afterwards it holds ``a``
    unless ``k`` is in ``T``; registers in ``T`` are empty afterwards and
    every other register keeps its content.
    """
    k = tr.register
    if regs[k - 1] is not None and regs[k - 1] != a:
        return None
    new = list(regs)
    new[k - 1] = a
    for j in tr.erase:
        new[j - 1] = None
    return tuple(new)


def fsuba_reachable(f: Fsuba, w: Sequence):
    out = {}
    for tr in sorted(f.transitions):
        out.setdefault(tr.src, []).append(tr)
    m = f.registers
    for tr in f.transitions:
        if not 1 <= tr.register <= m or any(not 1 <= j <= m for j in tr.erase):
            raise ValueError(f"index out of range in transition {tr}")
    layer = {(f.initial, (None,) * m)}
    layers = [layer]
    for a in w:
        nxt = set()
        for q, regs in layer:
            for tr in out.get(q, ()):
                new = fsuba_step(tr, regs, a)
                if new is not None:
                    nxt.add((tr.dst, new))
        layer = nxt
        layers.append(layer)
    return layers


def fsuba_accepts(f: Fsuba, w: Sequence) -> bool:
    return _fsuba_accepts(f, canonical_word(w))


@lru_cache(maxsize=65536)
def _fsuba_accepts(f, w):
    return any(q in f.final for q, _ in fsuba_reachable(f, w)[-1])


# -- register automata ---------------------------------------------------------------------

@lru_cache(maxsize=512)
def _regaut_engine(r: RegisterAutomaton) -> _Engine:
    table = {}
    for t in sorted(r.transitions):
        table.setdefault(t.src, []).append(
            ((lambda p, a, q, g=t.guard: eval_guard(g, p, a, q)), t.dst))
    return _Engine(r.registers, lambda j: table.get(j, ()), True, False)


def regaut_accepts(r: RegisterAutomaton, w: Sequence, pool: int | None = None) -> bool:
    """Membership from ``(c, empty registers)`` for some initial ``c``."""
    return _regaut_accepts(r, canonical_word(w),
                           default_pool(r.registers) if pool is None else pool)


@lru_cache(maxsize=65536)
def _regaut_accepts(r, w, pool):
    if not w:
        return bool(r.initial & r.final)
    engine = _regaut_engine(r)
    init = lambda names, pl: [(c, (None,) * r.registers) for c in r.initial]
    return _simulate(engine, init, r.final, w, pool)


# -- dispatch ---------------------------------------------------------------------------------

def accepts(machine, w: Sequence) -> bool:
    """Membership for any supported kind, under its own semantics."""
    if isinstance(machine, Nofa):
        if machine.semantics == EXACT:
            return nofa_accepts(machine, w)
        return nofra_accepts(machine, w)
    if isinstance(machine, TrackedNofra):
        return tracked_accepts(machine, w)
    if isinstance(machine, Fsuba):
        return fsuba_accepts(machine, w)
    if isinstance(machine, RegisterAutomaton):
        return regaut_accepts(machine, w)
    from .logic import Formula, eval_mso
    if isinstance(machine, Formula):
        return eval_mso(machine, tuple(w), {})
    raise TypeError(f"no membership for {type(machine).__name__}")


def words(atoms: Sequence, max_len: int):
    """All words over ``atoms`` up to ``max_len`` in length-lex order."""
    atoms = list(atoms)
    for n in range(max_len + 1):
        yield from itertools.product(atoms, repeat=n)


def sample_language(machine, atoms: Sequence, max_len: int) -> list:
    if not atoms:
        raise ValueError("need at least one atom")
    return [w for w in words(atoms, max_len) if accepts(machine, w)]
