"""Monadic second-order logic over data words.

First-order variables range over positions ``1..n`` and second-order
variables over sets of positions.  Atoms are ``x < y``, ``x ~ y`` (same
letter at both positions) and ``X(x)``.  Variables whose name starts with an
uppercase letter are second-order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .core import IN_REG, REG_IN, REG_REG, Nofa, SpecSyntaxError


class Formula:
    __slots__ = ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Sim(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Mem(Formula):
    set_var: str
    var: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple


@dataclass(frozen=True)
class ExistsFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsSO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallSO(Formula):
    var: str
    body: Formula


TRUE, FALSE = Const(True), Const(False)
QUANTIFIERS = (ExistsFO, ForallFO, ExistsSO, ForallSO)


def conj(*parts) -> Formula:
    """Conjunction; the empty conjunction is ``true``."""
    parts = tuple(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(*parts) -> Formula:
    """Disjunction; the empty disjunction is ``false``."""
    parts = tuple(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def implies(p: Formula, q: Formula) -> Formula:
    return Or((Not(p), q))


def is_so_name(name: str) -> bool:
    return name[:1].isupper()


def exists(var: str, body: Formula) -> Formula:
    return (ExistsSO if is_so_name(var) else ExistsFO)(var, body)


def forall(var: str, body: Formula) -> Formula:
    return (ForallSO if is_so_name(var) else ForallFO)(var, body)


def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, Const):
        return frozenset()
    if isinstance(phi, (Less, Sim)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Mem):
        return frozenset((phi.set_var, phi.var))
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in phi.parts))
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def size(phi: Formula) -> int:
    if isinstance(phi, Not):
        return 1 + size(phi.arg)
    if isinstance(phi, (And, Or)):
        return 1 + sum(size(p) for p in phi.parts)
    if isinstance(phi, QUANTIFIERS):
        return 1 + size(phi.body)
    return 1


def so_quantifier_count(phi: Formula) -> int:
    if isinstance(phi, Not):
        return so_quantifier_count(phi.arg)
    if isinstance(phi, (And, Or)):
        return sum(so_quantifier_count(p) for p in phi.parts)
    if isinstance(phi, QUANTIFIERS):
        own = isinstance(phi, (ExistsSO, ForallSO))
        return own + so_quantifier_count(phi.body)
    return 0


# -- normal forms ----------------------------------------------------------------

_DUAL = {ExistsFO: ForallFO, ForallFO: ExistsFO, ExistsSO: ForallSO, ForallSO: ExistsSO}


def nnf(phi: Formula, negate: bool = False) -> Formula:
    """Negation normal form: ``Not`` only in front of atoms."""
    if isinstance(phi, Const):
        return Const(phi.value != negate)
    if isinstance(phi, (Less, Sim, Mem)):
        return Not(phi) if negate else phi
    if isinstance(phi, Not):
        return nnf(phi.arg, not negate)
    if isinstance(phi, (And, Or)):
        parts = tuple(nnf(p, negate) for p in phi.parts)
        flip = isinstance(phi, And) == negate
        return Or(parts) if flip else And(parts)
    if isinstance(phi, QUANTIFIERS):
        cls = _DUAL[type(phi)] if negate else type(phi)
        return cls(phi.var, nnf(phi.body, negate))
    raise TypeError(f"not a formula: {phi!r}")


def _negated_sim(phi: Formula) -> bool:
    if isinstance(phi, Not):
        return isinstance(phi.arg, Sim) or _negated_sim(phi.arg)
    if isinstance(phi, (And, Or)):
        return any(_negated_sim(p) for p in phi.parts)
    if isinstance(phi, QUANTIFIERS):
        return _negated_sim(phi.body)
    return False


def is_positive_formula(phi: Formula) -> bool:
    """True iff the negation normal form has no ``!(x ~ y)``."""
    return not _negated_sim(nnf(phi))


# -- evaluation -----------------------------------------------------------------------
#
# Formulas compile to closures over an environment holding first-order
# positions and second-order sets as bitmask pairs ``(bits, known)``.
# Evaluation is three-valued so that a search over a block of second-order
# quantifiers can stop as soon as a partial assignment decides the body.

def _and3(values):
    unknown = False
    for v in values:
        if v is False:
            return False
        if v is None:
            unknown = True
    return None if unknown else True


class _Ctx:
    __slots__ = ("word", "n", "fo", "so", "full")

    def __init__(self, word, fo, so):
        self.word = word
        self.n = len(word)
        self.fo = fo
        self.so = so
        self.full = ((1 << self.n) - 1) << 1  # positions 1..n


def _compile(phi: Formula):
    if isinstance(phi, Const):
        v = phi.value
        return lambda c: v
    if isinstance(phi, Less):
        x, y = phi.left, phi.right
        return lambda c: c.fo[x] < c.fo[y]
    if isinstance(phi, Sim):
        x, y = phi.left, phi.right
        return lambda c: c.word[c.fo[x] - 1] == c.word[c.fo[y] - 1]
    if isinstance(phi, Mem):
        X, x = phi.set_var, phi.var

        def mem(c):
            bits, known = c.so[X]
            p = c.fo[x]
            if known >> p & 1:
                return bool(bits >> p & 1)
            return None
        return mem
    if isinstance(phi, Not):
        f = _compile(phi.arg)

        def neg(c):
            v = f(c)
            return None if v is None else not v
        return neg
    if isinstance(phi, And):
        fs = [_compile(p) for p in phi.parts]
        return lambda c: _and3(f(c) for f in fs)
    if isinstance(phi, Or):
        fs = [_compile(p) for p in phi.parts]

        def disjunction(c):
            unknown = False
            for f in fs:
                v = f(c)
                if v is True:
                    return True
                if v is None:
                    unknown = True
            return None if unknown else False
        return disjunction
    if isinstance(phi, (ExistsFO, ForallFO)):
        return _compile_fo(phi)
    if isinstance(phi, (ExistsSO, ForallSO)):
        return _compile_so(phi)
    raise TypeError(f"not a formula: {phi!r}")


def _compile_fo(phi):
    var, f = phi.var, _compile(phi.body)
    want = isinstance(phi, ExistsFO)

    def quant(c):
        saved = c.fo.get(var, _MISSING)
        unknown = False
        try:
            for p in range(1, c.n + 1):
                c.fo[var] = p
                v = f(c)
                if v is want:
                    return want
                if v is None:
                    unknown = True
        finally:
            if saved is _MISSING:
                c.fo.pop(var, None)
            else:
                c.fo[var] = saved
        return None if unknown else not want
    return quant


_MISSING = object()


def _compile_so(phi):
    """A maximal block of like second-order quantifiers, searched bit by bit
    in position-major order with three-valued pruning."""
    kind = type(phi)
    block = []
    body = phi
    while type(body) is kind:
        block.append(body.var)
        body = body.body
    f = _compile(body)
    want = kind is ExistsSO
    outer = free_vars(phi)
    outer_so = [v for v in outer if is_so_name(v)]

    def quant(c):
        # an undecided outer set leaves this block undecided too
        for v in outer_so:
            if c.so[v][1] != c.full:
                return None
        saved = {v: c.so.get(v, _MISSING) for v in block}
        for v in block:
            c.so[v] = (0, 0)
        order = [(p, v) for p in range(1, c.n + 1) for v in block]

        def rec(i):
            v = f(c)
            if v is not None or i == len(order):
                return v
            p, X = order[i]
            unknown = False
            bits, known = c.so[X]
            for bit in (1, 0):
                c.so[X] = (bits | (bit << p), known | (1 << p))
                r = rec(i + 1)
                if r is want:
                    c.so[X] = (bits, known)
                    return want
                if r is None:
                    unknown = True
            c.so[X] = (bits, known)
            return None if unknown else not want

        try:
            return rec(0)
        finally:
            for v, old in saved.items():
                if old is _MISSING:
                    c.so.pop(v, None)
                else:
                    c.so[v] = old
    return quant


_COMPILED = {}


def compiled(phi: Formula):
    f = _COMPILED.get(phi)
    if f is None:
        f = _COMPILED[phi] = _compile(phi)
    return f


def eval_mso(phi: Formula, w: Sequence, env: dict | None = None) -> bool:
    """Does word ``w`` with assignment ``env`` satisfy ``phi``?

    ``env`` maps first-order names to positions ``1..n`` and second-order
    names to sets of positions.
    """
    env = dict(env or {})
    n = len(w)
    missing = sorted(free_vars(phi) - set(env))
    if missing:
        raise ValueError("unbound variable: " + ", ".join(missing))
    fo, so = {}, {}
    full = ((1 << n) - 1) << 1
    for name, value in env.items():
        if is_so_name(name):
            positions = set(value)
            if any(not 1 <= p <= n for p in positions):
                raise ValueError(f"position out of range in {name}")
            so[name] = (sum(1 << p for p in positions), full)
        else:
            if not 1 <= value <= n:
                raise ValueError(f"position out of range: {name}={value}")
            fo[name] = value
    result = compiled(phi)(_Ctx(tuple(w), fo, so))
    assert result is not None
    return result


# -- the sentence for an automaton -----------------------------------------------------

def _pick(avoid, candidates=("z", "u", "v", "y", "x", "s", "t")):
    return next(c for c in candidates if c not in avoid)


def succ(x: str, y: str) -> Formula:
    z = _pick({x, y})
    return And((Less(x, y), Not(ExistsFO(z, And((Less(x, z), Less(z, y)))))))


def first(x: str) -> Formula:
    y = _pick({x}, ("y", "z", "u", "v"))
    return Not(ExistsFO(y, Less(y, x)))


def last(x: str) -> Formula:
    y = _pick({x}, ("y", "z", "u", "v"))
    return Not(ExistsFO(y, Less(x, y)))


def _clauses(ts, E, x):
    """The two inductive clauses for the auxiliary sets ``E[k]``."""
    base = [implies(Mem(R, x), Mem(E[e.left], x))
            for k in range(1, len(E) + 1)
            for R, t in ts for e in sorted(t.eqs) if e.kind == IN_REG and e.left == k]
    step = [implies(And((Mem(R, "z"), Mem(E[e.left], "y"))), Mem(E[e.right], "z"))
            for R, t in ts for e in sorted(t.eqs) if e.kind == REG_REG]
    return conj(*base), ForallFO("y", ForallFO("z", implies(succ("y", "z"), conj(*step))))


def automaton_to_mso(n: Nofa) -> Formula:
    """Sentence satisfied exactly by the words of the positive closure.

    One set variable ``R<i>`` marks the positions taking the ``i``-th
    transition (in sorted order); ``E<k>`` collects the positions where
    register ``k`` carries the letter read at ``x``, and ``Eb<k>`` ranges
    over competitors for the minimality check.
    """
    trans = n.sorted_transitions()
    ts = [(f"R{i}", t) for i, t in enumerate(trans, 1)]
    m = n.registers
    E = {k: f"E{k}" for k in range(1, m + 1)}
    Eb = {k: f"Eb{k}" for k in range(1, m + 1)}

    cover = ForallFO("x", disj(*(Mem(R, "x") for R, _ in ts)))
    unique = ForallFO("x", conj(*(Not(And((Mem(R1, "x"), Mem(R2, "x"))))
                                  for i, (R1, _) in enumerate(ts) for R2, _ in ts[i + 1:])))
    chain = ForallFO("x", ForallFO("y", implies(succ("x", "y"), disj(*(
        And((Mem(R1, "x"), Mem(R2, "y")))
        for R1, t1 in ts for R2, t2 in ts if t1.dst == t2.src)))))
    start = ForallFO("x", implies(first("x"), disj(*(
        Mem(R, "x") for R, t in ts if t.src in n.initial))))
    end = ForallFO("x", implies(last("x"), disj(*(
        Mem(R, "x") for R, t in ts if t.dst in n.final))))
    run = conj(cover, unique, chain, start, end)

    base, step = _clauses(ts, E, "x")
    base_b, step_b = _clauses(ts, Eb, "x")
    least = conj(*(ForallFO("y", implies(Mem(E[k], "y"), Mem(Eb[k], "y")))
                   for k in range(1, m + 1)))
    minimal = implies(conj(base_b, step_b), least)
    for k in reversed(range(1, m + 1)):
        minimal = ForallSO(Eb[k], minimal)
    aux = conj(base, step, minimal)

    eq = ForallFO("y", ForallFO("z", implies(succ("y", "z"), conj(*(
        implies(And((Mem(R, "z"), Mem(E[e.left], "y"))), Sim("x", "z"))
        for R, t in ts for e in sorted(t.eqs) if e.kind == REG_IN)))))

    inner = conj(aux, eq)
    for k in reversed(range(1, m + 1)):
        inner = ExistsSO(E[k], inner)
    body = conj(run, ForallFO("x", inner))
    for R, _ in reversed(ts):
        body = ExistsSO(R, body)
    if not n.initial & n.final:
        body = conj(body, ExistsFO("x", TRUE))
    return body


# -- text syntax -----------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[().&|!<~]))")
_KEYWORDS = {"exists", "forall", "true", "false"}


def _tokenize(text: str, line0: int = 1):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        mo = _TOKEN.match(text, pos)
        if mo is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}",
                                  *_line_col(text, pos, line0))
        kind = "name" if mo.group("name") else "op"
        tokens.append((kind, mo.group(kind), mo.start(kind)))
        pos = mo.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _line_col(text, pos, line0):
    line = text.count("\n", 0, pos)
    col = pos - (text.rfind("\n", 0, pos) + 1)
    return line0 + line, col + 1


class _Parser:
    def __init__(self, text, line0=1):
        self.text = text
        self.line0 = line0
        self.tokens = _tokenize(text, line0)
        self.i = 0

    def error(self, message, tok=None):
        tok = tok or self.tokens[self.i]
        raise SpecSyntaxError(message, *_line_col(self.text, tok[2], self.line0))

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None, kind=None):
        tok = self.tokens[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            self.error(f"expected {want!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def variable(self):
        tok = self.take(kind="name")
        if tok[1] in _KEYWORDS:
            self.error(f"keyword {tok[1]!r} used as a variable", tok)
        return tok[1]

    def formula(self):
        return self.disjunction()

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek()[1] == "|":
            self.take("|")
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.peek()[1] == "&":
            self.take("&")
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok[1] == "!":
            self.take("!")
            return Not(self.unary())
        if tok[1] == "(":
            self.take("(")
            inner = self.formula()
            self.take(")")
            return inner
        if tok[1] in ("exists", "forall") and tok[0] == "name":
            self.take()
            var = self.variable()
            self.take(".")
            body = self.formula()
            return (exists if tok[1] == "exists" else forall)(var, body)
        if tok[1] in ("true", "false") and tok[0] == "name":
            self.take()
            return Const(tok[1] == "true")
        left_tok = self.peek()
        left = self.variable()
        op = self.peek()[1]
        if op == "(":
            if not is_so_name(left):
                self.error(f"{left!r} is first-order and cannot be applied", left_tok)
            self.take("(")
            x = self.fo_variable()
            self.take(")")
            return Mem(left, x)
        if op in ("<", "~"):
            if is_so_name(left):
                self.error(f"{left!r} is second-order", left_tok)
            self.take(op)
            right = self.fo_variable()
            return (Less if op == "<" else Sim)(left, right)
        self.error(f"expected '<', '~' or '(' after {left!r}")

    def fo_variable(self):
        tok = self.peek()
        name = self.variable()
        if is_so_name(name):
            self.error(f"{name!r} is second-order", tok)
        return name


def parse_formula(text: str, line0: int = 1) -> Formula:
    p = _Parser(text, line0)
    phi = p.formula()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}")
    return phi


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Less):
        return f"{phi.left} < {phi.right}"
    if isinstance(phi, Sim):
        return f"{phi.left} ~ {phi.right}"
    if isinstance(phi, Mem):
        return f"{phi.set_var}({phi.var})"
    if isinstance(phi, Not):
        return "!" + _wrap(phi.arg, (And, Or) + QUANTIFIERS)
    if isinstance(phi, And):
        return " & ".join(_wrap(p, (And, Or) + QUANTIFIERS) for p in phi.parts)
    if isinstance(phi, Or):
        return " | ".join(_wrap(p, (Or,) + QUANTIFIERS) for p in phi.parts)
    if isinstance(phi, QUANTIFIERS):
        word = "exists" if isinstance(phi, (ExistsFO, ExistsSO)) else "forall"
        return f"{word} {phi.var}. {format_formula(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def _wrap(phi, kinds):
    text = format_formula(phi)
    return f"({text})" if isinstance(phi, kinds) else text


# -- sentences used as fixtures ---------------------------------------------------------------

def phi_repeat() -> Formula:
    """Some letter occurs twice."""
    return ExistsFO("x", ExistsFO("y", And((Less("x", "y"), Sim("x", "y")))))


def phi_last_fresh() -> Formula:
    """The last letter does not occur earlier."""
    return ForallFO("y", implies(last("y"), ForallFO("x", implies(Less("x", "y"),
                                                                   Not(Sim("x", "y"))))))


def phi_no_singleton() -> Formula:
    """No letter occurs exactly once."""
    return ForallFO("x", ExistsFO("y", And((Or((Less("x", "y"), Less("y", "x"))),
                                            Sim("x", "y")))))
