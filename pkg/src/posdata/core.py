"""Atoms, equations and the symbolic automaton model.

Atoms (data values) are plain ints. A register word is a tuple of atoms,
indexed from 1 in all user-facing APIs (register ``k`` is ``p[k - 1]``).

An automaton in strong normal form is stored symbolically: a finite control
``J``, a register count ``m`` and a set of abstract transitions ``(j, E, j')``
where ``E`` is a set of equations relating registers before the step, the
input letter, and registers after the step.  The same syntax is read under
two semantics:

* ``exact``: states ``J x A^{#m}`` (registers pairwise distinct), a concrete
  step is allowed iff the equations it induces are *exactly* ``E``;
* ``consistency``: states ``J x A^m``, a concrete step is allowed iff it
  satisfies every equation of some ``E`` (unlisted equalities may hold too).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Name = int
DataWord = tuple  # tuple[Name, ...]

REG_IN = 0   # k=.  register k before the step equals the input
IN_REG = 1   # .=k  the input equals register k after the step
REG_REG = 2  # k=k' register k before equals register k' after

EXACT = "exact"
CONSISTENCY = "consistency"
SEMANTICS = (EXACT, CONSISTENCY)


@dataclass(frozen=True, order=True)
class Equation:
    kind: int
    left: int
    right: int = 0

    def __str__(self):
        if self.kind == REG_IN:
            return f"{self.left}=."
        if self.kind == IN_REG:
            return f".={self.left}"
        return f"{self.left}={self.right}"

    def __repr__(self):
        return f"Equation({str(self)!r})"

    def indices(self):
        return (self.left, self.right) if self.kind == REG_REG else (self.left,)


def reg_in(k: int) -> Equation:
    return Equation(REG_IN, k)


def in_reg(k: int) -> Equation:
    return Equation(IN_REG, k)


def reg_reg(k: int, kb: int) -> Equation:
    return Equation(REG_REG, k, kb)


_EQ_RE = re.compile(r"^\s*(?:(\d+)\s*=\s*\.|\.\s*=\s*(\d+)|(\d+)\s*=\s*(\d+))\s*$")


def parse_equation(text: str) -> Equation:
    """Parse ``k=.``, ``.=k`` or ``k=k'`` (left index before, right after)."""
    mo = _EQ_RE.match(text)
    if mo is None:
        raise ValueError(f"malformed equation {text!r}")
    if mo.group(1):
        return reg_in(int(mo.group(1)))
    if mo.group(2):
        return in_reg(int(mo.group(2)))
    return reg_reg(int(mo.group(3)), int(mo.group(4)))


def parse_equations(text: str) -> frozenset:
    """Parse a comma separated list of equations, e.g. ``"1=., .=2"``."""
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(parse_equation(part) for part in text.split(","))


def as_equations(eqs) -> frozenset:
    if isinstance(eqs, str):
        return parse_equations(eqs)
    out = []
    for e in eqs:
        out.append(parse_equation(e) if isinstance(e, str) else e)
    return frozenset(out)


def sorted_equations(eqs: Iterable[Equation]) -> list:
    return sorted(set(eqs))


def format_equations(eqs: Iterable[Equation]) -> str:
    return ", ".join(str(e) for e in sorted_equations(eqs))


def validate_equations(eqs: Iterable[Equation], m: int) -> list:
    """Return the well-formedness violations of ``eqs`` for ``m`` registers.

    An empty list means the set can be induced by a step between two
    distinct-register words.
    """
    eqs = set(eqs)
    problems = []
    for e in sorted(eqs):
        if any(not 1 <= i <= m for i in e.indices()):
            problems.append(f"index out of range: {e} (registers: {m})")
    ins = sorted(e for e in eqs if e.kind == REG_IN)
    outs = sorted(e for e in eqs if e.kind == IN_REG)
    moves = sorted(e for e in eqs if e.kind == REG_REG)
    if len(ins) > 1:
        problems.append("two RegIn: " + ", ".join(map(str, ins)))
    if len(outs) > 1:
        problems.append("two InReg: " + ", ".join(map(str, outs)))
    for pos, what in ((1, "source"), (2, "target")):
        seen = {}
        for e in moves:
            key = e.left if pos == 1 else e.right
            seen.setdefault(key, []).append(e)
        for key, group in sorted(seen.items()):
            if len(group) > 1:
                problems.append(
                    f"RegReg {what} {key} used twice: " + ", ".join(map(str, group)))
    # any two of k=., .=kb, k=kb force the third
    for k, kb in itertools.product(
            {e.left for e in eqs} | {e.right for e in moves}, repeat=2):
        triple = (reg_in(k), in_reg(kb), reg_reg(k, kb))
        present = [t in eqs for t in triple]
        if sum(present) == 2:
            missing = triple[present.index(False)]
            problems.append(f"triple closure: missing {missing}")
    return problems


def _check_distinct(p: Sequence, what: str):
    if len(set(p)) != len(p):
        raise ValueError(f"{what} has repeated entries: {tuple(p)!r}")


def induced_abstraction(p: Sequence[Name], a: Name, q: Sequence[Name]) -> frozenset:
    """Equation set induced by the concrete step ``p --a--> q``."""
    _check_distinct(p, "source register word")
    _check_distinct(q, "target register word")
    return _abstraction(p, a, q)


def _abstraction(p, a, q) -> frozenset:
    out = []
    for k, v in enumerate(p, 1):
        if v == a:
            out.append(reg_in(k))
        for kb, w in enumerate(q, 1):
            if v == w:
                out.append(reg_reg(k, kb))
    for kb, w in enumerate(q, 1):
        if w == a:
            out.append(in_reg(kb))
    return frozenset(out)


def realize(eqs: Iterable[Equation], m: int, avoid: Iterable[Name] = ()):
    """Build a concrete step ``(p, a, q)`` whose induced abstraction is ``eqs``.

    Witness names are consecutive naturals above everything in ``avoid``,
    allocated in order of first appearance along ``p, a, q``.
    """
    eqs = frozenset(eqs)
    problems = validate_equations(eqs, m)
    if problems:
        raise ValueError("ill-formed equation set: " + "; ".join(problems))
    # slots: ("p", k), ("a",), ("q", k); merge the ones the equations identify
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in eqs:
        if e.kind == REG_IN:
            parent[find(("p", e.left))] = find(("a",))
        elif e.kind == IN_REG:
            parent[find(("q", e.left))] = find(("a",))
        else:
            parent[find(("q", e.right))] = find(("p", e.left))
    avoid = list(avoid)
    fresh = itertools.count(max(avoid) + 1 if avoid else 0)
    names = {}

    def name_of(slot):
        root = find(slot)
        if root not in names:
            names[root] = next(fresh)
        return names[root]

    p = tuple(name_of(("p", k)) for k in range(1, m + 1))
    a = name_of(("a",))
    q = tuple(name_of(("q", k)) for k in range(1, m + 1))
    return p, a, q


def is_consistent(q: Sequence[Name], b: Name, q2: Sequence[Name],
                  eqs: Iterable[Equation]) -> bool:
    """Does the step ``q --b--> q2`` satisfy every equation of ``eqs``?"""
    for e in eqs:
        if e.kind == REG_IN:
            if q[e.left - 1] != b:
                return False
        elif e.kind == IN_REG:
            if q2[e.left - 1] != b:
                return False
        elif q[e.left - 1] != q2[e.right - 1]:
            return False
    return True


def all_equation_sets(m: int):
    """Every well-formed equation set over ``m`` registers (exponential)."""
    universe = ([reg_in(k) for k in range(1, m + 1)]
                + [in_reg(k) for k in range(1, m + 1)]
                + [reg_reg(k, kb) for k in range(1, m + 1) for kb in range(1, m + 1)])
    for bits in itertools.product((False, True), repeat=len(universe)):
        eqs = frozenset(e for e, b in zip(universe, bits) if b)
        if not validate_equations(eqs, m):
            yield eqs


def restrict(eqs: Iterable[Equation], regs) -> frozenset:
    """Equations whose left-hand side is a register in ``regs``."""
    return frozenset(e for e in eqs
                     if e.kind != IN_REG and e.left in regs)


def track(regs, eqs: Iterable[Equation]) -> frozenset:
    """The register set reached from ``regs`` along ``eqs``.

    A register is tracked after the step if it receives the input or
    receives the content of a tracked register.
    """
    out = set()
    for e in eqs:
        if e.kind == IN_REG:
            out.add(e.left)
        elif e.kind == REG_REG and e.left in regs:
            out.add(e.right)
    return frozenset(out)


_LABEL_RE = re.compile(r"^[^\s\[\]#]+$")


def check_label(label: str) -> bool:
    return isinstance(label, str) and bool(_LABEL_RE.match(label)) and label != "->"


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    eqs: frozenset = field(compare=False)
    dst: str
    _key: tuple = field(init=False, repr=False, compare=True, default=())

    def __post_init__(self):
        object.__setattr__(self, "eqs", as_equations(self.eqs))
        object.__setattr__(self, "_key", tuple(sorted(self.eqs)))

    def __str__(self):
        return f"{self.src} -> {self.dst} [{format_equations(self.eqs)}]"


def _as_transition(t) -> Transition:
    if isinstance(t, Transition):
        return t
    src, eqs, dst = t
    return Transition(src, eqs, dst)


@dataclass(frozen=True)
class Nofa:
    """Symbolic automaton over ``J x A^(#)m``.

    ``transitions`` accepts :class:`Transition` objects or ``(src, eqs, dst)``
    triples where ``eqs`` may be given as text (``"1=., .=2"``).  When
    ``states`` is empty it defaults to every referenced label.
    """

    states: frozenset
    registers: int
    transitions: frozenset
    initial: frozenset
    final: frozenset
    semantics: str = EXACT

    def __post_init__(self):
        trans = frozenset(_as_transition(t) for t in self.transitions)
        initial = frozenset(self.initial)
        final = frozenset(self.final)
        states = frozenset(self.states)
        if not states:
            states = initial | final | {t.src for t in trans} | {t.dst for t in trans}
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "final", final)
        object.__setattr__(self, "states", states)

    def sorted_transitions(self) -> list:
        return sorted(self.transitions)

    def outgoing(self):
        out = {}
        for t in self.sorted_transitions():
            out.setdefault(t.src, []).append(t)
        return out


def validate_automaton(n: Nofa) -> list:
    """All invariant violations of ``n``; an empty list means valid."""
    errors = []
    if not isinstance(n.registers, int) or n.registers < 0:
        errors.append(f"register count must be a natural number, got {n.registers!r}")
        return errors
    if n.semantics not in SEMANTICS:
        errors.append(f"unknown semantics {n.semantics!r}")
    for s in sorted(n.states):
        if not check_label(s):
            errors.append(f"bad state label {s!r}")
    for what, group in (("initial", n.initial), ("final", n.final)):
        for s in sorted(group - n.states):
            errors.append(f"unknown state {s!r} in {what} states")
    for t in n.sorted_transitions():
        for s in (t.src, t.dst):
            if s not in n.states:
                errors.append(f"unknown state {s!r} in transition {t}")
        for problem in validate_equations(t.eqs, n.registers):
            errors.append(f"transition {t}: {problem}")
    return errors


def is_rigid(n: Nofa) -> bool:
    """True iff no transition moves a value to a different register."""
    return all(e.left == e.right for t in n.transitions for e in t.eqs
               if e.kind == REG_REG)


def names_of(word: Sequence[Name]) -> list:
    """Distinct letters of ``word`` in first-appearance order."""
    return list(dict.fromkeys(word))


def fresh_pool(word: Sequence[Name], size: int, avoid: Optional[Iterable[Name]] = None) -> tuple:
    taken = set(word) | set(avoid or ())
    start = max(taken) + 1 if taken else 0
    return tuple(range(start, start + size))


class SpecSyntaxError(ValueError):
    """Malformed input text, located by 1-based line and column."""

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col
