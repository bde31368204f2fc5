"""Automaton kinds produced by the construction chain, and the constructions.

Starting from a symbolic automaton ``N`` in strong normal form:

* :func:`positive_closure` reinterprets ``N`` under consistency semantics;
* :func:`deguess` tracks which registers hold determined values, giving a
  non-guessing automaton (:class:`TrackedNofra`);
* :func:`rigidify` records register permutations in the control so that no
  value ever changes register;
* :func:`to_fsuba` turns a rigid automaton into an FSUBA with ``m + 1``
  registers;
* :func:`to_positive_regaut` turns abstract transitions into conjunctive
  register-automaton guards.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field, replace

from .core import (CONSISTENCY, IN_REG, REG_IN, REG_REG, Nofa,
                   Transition, as_equations, check_label, format_equations,
                   in_reg, is_rigid, reg_in, reg_reg, restrict, track,
                   validate_equations)

log = logging.getLogger(__name__)


# -- tracked (guess-free) automata -------------------------------------------

def tracked_label(control) -> str:
    j, regs = control
    return f"{j}{{{','.join(map(str, sorted(regs)))}}}"


@dataclass(frozen=True, eq=False)
class TrackedTransition:
    src: tuple
    eqs: frozenset
    dst: tuple
    _key: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "src", (self.src[0], frozenset(self.src[1])))
        object.__setattr__(self, "dst", (self.dst[0], frozenset(self.dst[1])))
        object.__setattr__(self, "eqs", as_equations(self.eqs))
        object.__setattr__(self, "_key", (
            self.src[0], tuple(sorted(self.src[1])),
            self.dst[0], tuple(sorted(self.dst[1])), tuple(sorted(self.eqs))))

    def __lt__(self, other):
        return self._key < other._key

    def __eq__(self, other):
        return isinstance(other, TrackedTransition) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def tracked(self) -> frozenset:
        """The register set ``S'`` of the target control."""
        return self.dst[1]

    def __str__(self):
        return (f"{tracked_label(self.src)} -> {tracked_label(self.dst)} "
                f"[{format_equations(self.eqs)}]")


@dataclass(frozen=True)
class TrackedNofra:
    """Controls are pairs ``(j, S)`` with ``S`` the registers holding values
    forced by the run so far; only those registers are stored."""

    controls: frozenset
    registers: int
    transitions: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        norm = lambda cs: frozenset((j, frozenset(s)) for j, s in cs)
        trans = frozenset(t if isinstance(t, TrackedTransition) else TrackedTransition(*t)
                          for t in self.transitions)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "controls", norm(self.controls))
        object.__setattr__(self, "initial", norm(self.initial))
        object.__setattr__(self, "final", norm(self.final))

    def sorted_controls(self) -> list:
        return sorted(self.controls, key=lambda c: (c[0], sorted(c[1])))


def validate_tracked(t: TrackedNofra) -> list:
    errors = []
    m = t.registers
    for j, regs in t.sorted_controls():
        if not check_label(j) or "{" in j:
            errors.append(f"bad control label {j!r}")
        if any(not 1 <= k <= m for k in regs):
            errors.append(f"index out of range in control {tracked_label((j, regs))}")
    for what, group in (("initial", t.initial), ("final", t.final)):
        for c in group - t.controls:
            errors.append(f"unknown state {tracked_label(c)} in {what} states")
    for c in t.initial:
        if c[1]:
            errors.append(f"initial control {tracked_label(c)} tracks registers")
    for tr in sorted(t.transitions):
        for c in (tr.src, tr.dst):
            if c not in t.controls:
                errors.append(f"unknown state {tracked_label(c)} in transition {tr}")
        for problem in validate_equations(tr.eqs, m):
            errors.append(f"transition {tr}: {problem}")
        if track(tr.src[1], tr.eqs) != tr.dst[1]:
            errors.append(f"transition {tr}: target register set does not follow "
                          "from the source set and the equations")
    return errors


# -- FSUBA ---------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class FsubaTransition:
    src: str
    register: int
    erase: frozenset = field(compare=False)
    dst: str
    _key: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "erase", frozenset(self.erase))
        object.__setattr__(self, "_key", tuple(sorted(self.erase)))

    def __str__(self):
        return (f"{self.src} -{self.register},{{{','.join(map(str, sorted(self.erase)))}}}-> "
                f"{self.dst}")


@dataclass(frozen=True)
class Fsuba:
    """Finite-state unification-based automaton with empty initial registers.

    A transition ``(q, k, T, q')`` reads input ``a`` when register ``k`` is
    empty or holds ``a``; afterwards register ``k`` holds ``a`` unless
    ``k`` is in ``T``, registers in ``T`` are empty, all others keep their
    content.
    """

    states: frozenset
    registers: int
    transitions: frozenset
    initial: str
    final: frozenset

    def __post_init__(self):
        trans = frozenset(t if isinstance(t, FsubaTransition) else FsubaTransition(*t)
                          for t in self.transitions)
        object.__setattr__(self, "transitions", trans)
        final = frozenset(self.final)
        states = frozenset(self.states)
        if not states:
            states = ({self.initial} | final | {t.src for t in trans}
                      | {t.dst for t in trans})
        object.__setattr__(self, "final", final)
        object.__setattr__(self, "states", states)


def validate_fsuba(f: Fsuba) -> list:
    errors = []
    m = f.registers
    if not isinstance(m, int) or m < 0:
        return [f"register count must be a natural number, got {m!r}"]
    for s in sorted(f.states):
        if not check_label(s):
            errors.append(f"bad state label {s!r}")
    if f.initial not in f.states:
        errors.append(f"unknown state {f.initial!r} as initial state")
    for s in sorted(f.final - f.states):
        errors.append(f"unknown state {s!r} in final states")
    for t in sorted(f.transitions):
        for s in (t.src, t.dst):
            if s not in f.states:
                errors.append(f"unknown state {s!r} in transition {t}")
        if not 1 <= t.register <= m or any(not 1 <= j <= m for j in t.erase):
            errors.append(f"index out of range in transition {t}")
    return errors


# -- register automata -----------------------------------------------------------

BEFORE, AFTER, INPUT = "b", "a", "."


@dataclass(frozen=True, order=True)
class Slot:
    """Operand of a guard equation: ``(k,b)``, ``(k,a)`` or the input ``.``."""

    side: str
    index: int = 0

    def __str__(self):
        return INPUT if self.side == INPUT else f"({self.index},{self.side})"


@dataclass(frozen=True)
class BTrue:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class BEq:
    left: Slot
    right: Slot

    def __str__(self):
        return f"{self.left}={self.right}"


@dataclass(frozen=True)
class BNot:
    arg: object


@dataclass(frozen=True)
class BAnd:
    parts: tuple


@dataclass(frozen=True)
class BOr:
    parts: tuple


def guard_and(parts) -> object:
    parts = tuple(parts)
    if not parts:
        return BTrue()
    return parts[0] if len(parts) == 1 else BAnd(parts)


def format_guard(g, parent: int = 0) -> str:
    # precedence: | = 1, & = 2, ! = 3
    if isinstance(g, (BTrue, BEq)):
        return str(g)
    if isinstance(g, BNot):
        return "!" + format_guard(g.arg, 3)
    if isinstance(g, BAnd):
        text, prec = " & ".join(format_guard(p, 2.5) for p in g.parts), 2
    else:
        text, prec = " | ".join(format_guard(p, 1.5) for p in g.parts), 1
    return f"({text})" if parent > prec else text


def eval_guard(g, before, a, after) -> bool:
    """Evaluate a guard; ``None`` registers are empty and equal nothing."""
    if isinstance(g, BEq):
        x, y = _slot_value(g.left, before, a, after), _slot_value(g.right, before, a, after)
        return x is not None and x == y
    if isinstance(g, BTrue):
        return True
    if isinstance(g, BNot):
        return not eval_guard(g.arg, before, a, after)
    if isinstance(g, BAnd):
        return all(eval_guard(p, before, a, after) for p in g.parts)
    if isinstance(g, BOr):
        return any(eval_guard(p, before, a, after) for p in g.parts)
    raise TypeError(f"not a guard: {g!r}")


def _slot_value(s: Slot, before, a, after):
    if s.side == INPUT:
        return a
    return (before if s.side == BEFORE else after)[s.index - 1]


def guard_slots(g):
    if isinstance(g, BEq):
        yield g.left
        yield g.right
    elif isinstance(g, BNot):
        yield from guard_slots(g.arg)
    elif isinstance(g, (BAnd, BOr)):
        for p in g.parts:
            yield from guard_slots(p)


def guard_has_negation(g) -> bool:
    if isinstance(g, BNot):
        return True
    if isinstance(g, (BAnd, BOr)):
        return any(guard_has_negation(p) for p in g.parts)
    return False


@dataclass(frozen=True, order=True)
class RegTransition:
    src: str
    guard: object = field(compare=False)
    dst: str
    _key: str = field(init=False, repr=False, default="")

    def __post_init__(self):
        object.__setattr__(self, "_key", format_guard(self.guard))

    def __str__(self):
        return f"{self.src} -> {self.dst} [{format_guard(self.guard)}]"


@dataclass(frozen=True)
class RegisterAutomaton:
    states: frozenset
    registers: int
    transitions: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        trans = frozenset(t if isinstance(t, RegTransition) else RegTransition(*t)
                          for t in self.transitions)
        object.__setattr__(self, "transitions", trans)
        initial, final = frozenset(self.initial), frozenset(self.final)
        states = frozenset(self.states)
        if not states:
            states = initial | final | {t.src for t in trans} | {t.dst for t in trans}
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "final", final)
        object.__setattr__(self, "states", states)

    def is_positive(self) -> bool:
        return not any(guard_has_negation(t.guard) for t in self.transitions)


def validate_regaut(r: RegisterAutomaton) -> list:
    errors = []
    m = r.registers
    if not isinstance(m, int) or m < 0:
        return [f"register count must be a natural number, got {m!r}"]
    for s in sorted(r.states):
        if not check_label(s):
            errors.append(f"bad state label {s!r}")
    for what, group in (("initial", r.initial), ("final", r.final)):
        for s in sorted(group - r.states):
            errors.append(f"unknown state {s!r} in {what} states")
    for t in sorted(r.transitions):
        for s in (t.src, t.dst):
            if s not in r.states:
                errors.append(f"unknown state {s!r} in transition {t}")
        for slot in guard_slots(t.guard):
            if slot.side != INPUT and not 1 <= slot.index <= m:
                errors.append(f"index out of range: {slot} in transition {t}")
    return errors


# -- constructions -----------------------------------------------------------------

def positive_closure(n: Nofa) -> Nofa:
    """The same abstract transitions read under consistency semantics."""
    return replace(n, semantics=CONSISTENCY)


def deguess(n: Nofa) -> TrackedNofra:
    """Track determined registers; only reachable ``(j, S)`` are built."""
    out = n.outgoing()
    start = [(j, frozenset()) for j in sorted(n.initial)]
    seen = set(start)
    todo = deque(start)
    trans = []
    while todo:
        j, regs = todo.popleft()
        for t in out.get(j, ()):
            target = (t.dst, track(regs, t.eqs))
            trans.append(TrackedTransition((j, regs), t.eqs, target))
            if target not in seen:
                seen.add(target)
                todo.append(target)
    return TrackedNofra(
        controls=seen,
        registers=n.registers,
        transitions=trans,
        initial=start,
        final=[c for c in seen if c[0] in n.final],
    )


def perm_label(j: str, perm: tuple) -> str:
    return f"{j}@{'.'.join(map(str, perm))}"


def rigidify(n: Nofa) -> Nofa:
    """Equivalent automaton whose register moves are all diagonal.

    The control additionally stores a permutation ``pi`` of the registers:
    the value a source automaton keeps in register ``k`` lives in register
    ``pi(k)``.  Emits ``|J| * m!`` controls.
    """
    m = n.registers
    if m > 4:
        log.warning("rigidify: %d registers give %d permutations per control",
                    m, _factorial(m))
    perms = list(itertools.permutations(range(1, m + 1)))
    ident = tuple(range(1, m + 1))
    trans = []
    for t in n.sorted_transitions():
        moves = [e for e in t.eqs if e.kind == REG_REG]
        for pi in perms:
            # pi'(kb) is forced to pi(k) on moved registers, free elsewhere
            forced = {e.right: pi[e.left - 1] for e in moves}
            for pi2 in perms:
                if any(pi2[kb - 1] != v for kb, v in forced.items()):
                    continue
                eqs = []
                for e in t.eqs:
                    if e.kind == REG_IN:
                        eqs.append(reg_in(pi[e.left - 1]))
                    elif e.kind == IN_REG:
                        eqs.append(in_reg(pi2[e.left - 1]))
                    else:
                        v = pi[e.left - 1]
                        eqs.append(reg_reg(v, v))
                trans.append(Transition(perm_label(t.src, pi), frozenset(eqs),
                                        perm_label(t.dst, pi2)))
    return Nofa(
        states=[perm_label(j, pi) for j in n.states for pi in perms],
        registers=m,
        transitions=trans,
        initial=[perm_label(j, ident) for j in n.initial],
        final=[perm_label(j, pi) for j in n.final for pi in perms],
        semantics=n.semantics,
    )


def _factorial(m):
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def fsuba_label(j: str, keep, regs) -> str:
    fmt = lambda s: "{" + ",".join(map(str, sorted(s))) + "}"
    return f"{j}{fmt(keep)}{fmt(regs)}"


FSUBA_START = "q0"


def to_fsuba(n: Nofa) -> Fsuba:
    """FSUBA with ``m + 1`` registers for a rigid automaton.

    Controls are ``(j, R, S)``: ``S`` are the determined registers, ``R``
    those of them still needed for a later comparison.  Register ``m + 1``
    is a scratch register used when the input is not compared or stored.
    """
    if not is_rigid(n):
        raise ValueError("to_fsuba needs a rigid automaton; apply rigidify first")
    m = n.registers
    every = frozenset(range(1, m + 2))
    out = n.outgoing()
    start = [(j, frozenset(), frozenset()) for j in sorted(n.initial)]
    seen = set(start)
    todo = deque(start)
    trans = set()

    def emit(src, k, keep, regs, dst):
        target = (dst, keep, regs)
        trans.add(FsubaTransition(fsuba_label(*src), k, every - keep,
                                  fsuba_label(*target)))
        if target not in seen:
            seen.add(target)
            todo.append(target)

    while todo:
        j, keep, regs = todo.popleft()
        for t in out.get(j, ()):
            known = restrict(t.eqs, regs)
            compared = [e.left for e in known if e.kind == REG_IN]
            if any(k not in keep for k in compared):
                continue
            keep2, regs2 = track(keep, t.eqs), track(regs, t.eqs)
            stored = [e.left for e in t.eqs if e.kind == IN_REG]
            hit = sorted(set(compared) | set(stored))
            if hit:
                # rigidity makes the compared and the stored register coincide
                k, = hit
                emit((j, keep, regs), k, keep2, regs2, t.dst)
                emit((j, keep, regs), k, keep2 - {k}, regs2, t.dst)
            else:
                emit((j, keep, regs), m + 1, keep2, regs2, t.dst)
    start_labels = {fsuba_label(*s) for s in start}
    for t in list(trans):
        if t.src in start_labels:
            trans.add(FsubaTransition(FSUBA_START, t.register, t.erase, t.dst))
    final = [fsuba_label(*c) for c in seen if c[0] in n.final]
    if n.initial & n.final:
        final.append(FSUBA_START)
    return Fsuba(
        states=[FSUBA_START] + [fsuba_label(*c) for c in seen],
        registers=m + 1,
        transitions=trans,
        initial=FSUBA_START,
        final=final,
    )


def fresh_label(base: str, taken) -> str:
    label = base
    while label in taken:
        label += "'"
    return label


def equation_guard(e) -> BEq:
    if e.kind == REG_IN:
        return BEq(Slot(BEFORE, e.left), Slot(INPUT))
    if e.kind == IN_REG:
        return BEq(Slot(INPUT), Slot(AFTER, e.left))
    return BEq(Slot(BEFORE, e.left), Slot(AFTER, e.right))


def to_positive_regaut(n: Nofa) -> RegisterAutomaton:
    """Positive register automaton accepting the positive closure of ``n``."""
    start = fresh_label("start", n.states)
    trans = []
    for t in n.sorted_transitions():
        trans.append(RegTransition(
            t.src, guard_and(equation_guard(e) for e in sorted(t.eqs)), t.dst))
        if t.src in n.initial:
            stored = [e for e in sorted(t.eqs) if e.kind == IN_REG]
            trans.append(RegTransition(start, guard_and(equation_guard(e) for e in stored),
                                       t.dst))
    final = set(n.final)
    if n.initial & n.final:
        final.add(start)
    return RegisterAutomaton(
        states=set(n.states) | {start},
        registers=n.registers,
        transitions=trans,
        initial=[start],
        final=final,
    )
