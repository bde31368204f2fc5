"""Line-oriented text format for automata, formulas and words.

Example::

    kind: nofa
    registers: 1
    states: f h s
    initial: s
    final: f
    trans: s -> h [.=1]

``kind`` is one of nofa (exact semantics), nofra (consistency semantics),
tracked, fsuba, regaut, mso or word.  ``#`` starts a comment.  Text without
a ``kind:`` header is read as a word.
"""
from __future__ import annotations

import re

from .core import (CONSISTENCY, EXACT, Nofa, SpecSyntaxError, Transition,
                   format_equations, parse_equation, validate_automaton)
from .logic import Formula, format_formula, parse_formula
from .transforms import (INPUT, BAnd, BEq, BNot, BOr, BTrue,
                         Fsuba, FsubaTransition, RegisterAutomaton,
                         RegTransition, Slot, TrackedNofra, TrackedTransition,
                         tracked_label, validate_fsuba,
                         validate_regaut, validate_tracked)

KINDS = ("nofa", "nofra", "tracked", "fsuba", "regaut", "mso", "word")


class ValidationError(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


# -- words -------------------------------------------------------------------------

def parse_word(text: str):
    """Intern whitespace separated atoms; returns ``(word, names)`` where
    ``names[i]`` is the text of atom ``i``."""
    ids = {}
    word = tuple(ids.setdefault(tok, len(ids)) for tok in text.split())
    return word, list(ids)


def format_word(w, names=None) -> str:
    return " ".join(str(names[a]) if names else str(a) for a in w)


# -- reading -----------------------------------------------------------------------

_HEADER = re.compile(r"^([a-z]+)\s*:(.*)$")


def _lines(text):
    for no, raw in enumerate(text.replace("\r\n", "\n").split("\n"), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield no, line


def parse_spec(text: str, validate: bool = True):
    """Parse one artifact; raise :class:`SpecSyntaxError` or
    :class:`ValidationError`."""
    lines = list(_lines(text))
    if not lines or not lines[0][1].lstrip().startswith("kind:"):
        if any(_HEADER.match(l.strip()) for _, l in lines):
            no = next(n for n, l in lines if _HEADER.match(l.strip()))
            raise SpecSyntaxError("missing 'kind:' header", no, 1)
        return parse_word(" ".join(l for _, l in lines))[0]
    headers = {}
    trans = []
    formula_lines = []
    for no, line in lines:
        if formula_lines:
            formula_lines.append((no, line))
            continue
        mo = _HEADER.match(line.strip())
        if mo is None:
            raise SpecSyntaxError(f"expected 'header: value', found {line.strip()!r}", no, 1)
        key, value = mo.group(1), mo.group(2)
        col = line.index(":") + 2  # 1-based column right after the colon
        if key == "trans":
            trans.append((no, col, value))
        elif key == "formula":
            formula_lines.append((no, " " * col + value))
        elif key in headers:
            raise SpecSyntaxError(f"duplicate header {key!r}", no, 1)
        else:
            headers[key] = (no, col + len(value) - len(value.lstrip()), value.strip())
    kind = headers.pop("kind")[2]
    if kind not in KINDS:
        no = lines[0][0]
        raise SpecSyntaxError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", no, 1)
    if kind == "mso":
        if not formula_lines:
            raise SpecSyntaxError("missing 'formula:' header", lines[-1][0], 1)
        first = formula_lines[0][0]
        return parse_formula("\n".join(l for _, l in formula_lines), first)
    if kind == "word":
        return parse_word(headers.get("word", (0, 0, ""))[2])[0]
    allowed = {"registers", "states", "initial", "final"}
    for key, (no, _, _) in headers.items():
        if key not in allowed:
            raise SpecSyntaxError(f"unknown header {key!r}", no, 1)
    m = _registers(headers)
    states = _labels(headers, "states")
    initial = _labels(headers, "initial")
    final = _labels(headers, "final")
    if kind in ("nofa", "nofra"):
        result = Nofa(states, m, [_nofa_transition(*t) for t in trans], initial, final,
                      EXACT if kind == "nofa" else CONSISTENCY)
        errors = validate_automaton(result)
    elif kind == "tracked":
        at = lambda key: headers.get(key, (lines[0][0], 1))[:2]
        result = TrackedNofra(
            [_control(s, *at("states")) for s in states], m,
            [_tracked_transition(*t) for t in trans],
            [_control(s, *at("initial")) for s in initial],
            [_control(s, *at("final")) for s in final])
        errors = validate_tracked(result)
    elif kind == "fsuba":
        fsuba_trans = [_fsuba_transition(*t) for t in trans]
        if len(initial) != 1:
            no = headers.get("initial", (lines[0][0],))[0]
            raise SpecSyntaxError("an FSUBA has exactly one initial state", no, 1)
        result = Fsuba(states, m, fsuba_trans, initial[0], final)
        errors = validate_fsuba(result)
    else:
        result = RegisterAutomaton(states, m, [_reg_transition(*t) for t in trans],
                                   initial, final)
        errors = validate_regaut(result)
    if validate and errors:
        raise ValidationError(errors)
    return result


def _registers(headers):
    if "registers" not in headers:
        return 0
    no, col, value = headers["registers"]
    if not value.isdigit():
        raise SpecSyntaxError(f"register count must be a natural number, got {value!r}", no, col)
    return int(value)


def _labels(headers, key):
    return headers[key][2].split() if key in headers else []


_ARROW = re.compile(r"^\s*(\S+)\s+->\s+(\S+)\s*\[(.*)\]\s*$")


def _split_arrow(no, col, value):
    mo = _ARROW.match(value)
    if mo is None:
        raise SpecSyntaxError("expected 'src -> dst [ ... ]'", no,
                              col + len(value) - len(value.lstrip()))
    return mo.group(1), mo.group(2), mo.group(3), col + mo.start(3)


def _equations(no, col, text):
    eqs = []
    offset = 0
    for part in text.split(","):
        if part.strip():
            try:
                eqs.append(parse_equation(part))
            except ValueError:
                raise SpecSyntaxError(f"malformed equation {part.strip()!r}", no,
                                      col + offset + len(part) - len(part.lstrip())) from None
        offset += len(part) + 1
    return frozenset(eqs)


def _nofa_transition(no, col, value):
    src, dst, body, bcol = _split_arrow(no, col, value)
    return Transition(src, _equations(no, bcol, body), dst)


_CONTROL = re.compile(r"^([^{}]+)\{([0-9,]*)\}$")


def _control(label, no, col=1):
    mo = _CONTROL.match(label)
    if mo is None:
        raise SpecSyntaxError(f"expected a tracked control 'label{{1,2}}', found {label!r}",
                              no, col)
    regs = frozenset(int(k) for k in mo.group(2).split(",") if k)
    return mo.group(1), regs


def _tracked_transition(no, col, value):
    src, dst, body, bcol = _split_arrow(no, col, value)
    return TrackedTransition(_control(src, no, col), _equations(no, bcol, body),
                             _control(dst, no, col))


_FSUBA = re.compile(r"^\s*(\S+)\s+-(\d+),\{([0-9,\s]*)\}->\s+(\S+)\s*$")


def _fsuba_transition(no, col, value):
    mo = _FSUBA.match(value)
    if mo is None:
        raise SpecSyntaxError("expected 'src -k,{T}-> dst'", no,
                              col + len(value) - len(value.lstrip()))
    erase = frozenset(int(k) for k in mo.group(3).replace(" ", "").split(",") if k)
    return FsubaTransition(mo.group(1), int(mo.group(2)), erase, mo.group(4))


def _reg_transition(no, col, value):
    src, dst, body, bcol = _split_arrow(no, col, value)
    return RegTransition(src, parse_guard(body, no, bcol), dst)


_GUARD_TOKEN = re.compile(
    r"\s*(?:(?P<slot>\(\s*(?P<k>\d+)\s*,\s*(?P<side>[ab])\s*\))|(?P<input>\.)"
    r"|(?P<true>true\b)|(?P<op>[=&|!()]))")


def parse_guard(text: str, line: int = 1, col: int = 1):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mo = _GUARD_TOKEN.match(text, pos)
        if mo is None:
            raise SpecSyntaxError(f"unexpected {text[pos]!r} in guard", line, col + pos)
        start = pos
        if mo.group("slot"):
            tok = ("slot", Slot(mo.group("side"), int(mo.group("k"))))
        elif mo.group("input"):
            tok = ("slot", Slot(INPUT))
        elif mo.group("true"):
            tok = ("true", None)
        else:
            tok = ("op", mo.group("op"))
        tokens.append(tok + (col + start,))
        pos = mo.end()
    tokens.append(("end", None, col + len(text)))
    i = 0

    def peek():
        return tokens[i]

    def fail(message):
        raise SpecSyntaxError(message, line, tokens[i][2])

    def expect_op(op):
        nonlocal i
        if tokens[i][:2] != ("op", op):
            fail(f"expected {op!r} in guard")
        i += 1

    def disjunction():
        parts = [conjunction()]
        while peek()[:2] == ("op", "|"):
            expect_op("|")
            parts.append(conjunction())
        return parts[0] if len(parts) == 1 else BOr(tuple(parts))

    def conjunction():
        parts = [unary()]
        while peek()[:2] == ("op", "&"):
            expect_op("&")
            parts.append(unary())
        return parts[0] if len(parts) == 1 else BAnd(tuple(parts))

    def unary():
        nonlocal i
        kind, value, _ = peek()
        if (kind, value) == ("op", "!"):
            i += 1
            return BNot(unary())
        if (kind, value) == ("op", "("):
            i += 1
            inner = disjunction()
            expect_op(")")
            return inner
        if kind == "true":
            i += 1
            return BTrue()
        if kind == "slot":
            i += 1
            expect_op("=")
            if peek()[0] != "slot":
                fail("expected a register slot or '.' after '='")
            right = peek()[1]
            i += 1
            return BEq(value, right)
        fail("expected a guard")

    guard = disjunction()
    if peek()[0] != "end":
        fail("unexpected text after guard")
    return guard


# -- writing ----------------------------------------------------------------------------

def print_spec(artifact, names=None) -> str:
    """Canonical text; ``parse_spec(print_spec(a)) == a``."""
    if isinstance(artifact, Formula):
        return f"kind: mso\nformula: {format_formula(artifact)}\n"
    if isinstance(artifact, tuple):
        return f"kind: word\nword: {format_word(artifact, names)}\n"
    if isinstance(artifact, Nofa):
        kind = "nofa" if artifact.semantics == EXACT else "nofra"
        lines = _head(kind, artifact.registers, sorted(artifact.states),
                      sorted(artifact.initial), sorted(artifact.final))
        lines += [f"trans: {t.src} -> {t.dst} [{format_equations(t.eqs)}]"
                  for t in artifact.sorted_transitions()]
    elif isinstance(artifact, TrackedNofra):
        order = lambda cs: [tracked_label(c) for c in sorted(cs, key=_control_key)]
        lines = _head("tracked", artifact.registers, order(artifact.controls),
                      order(artifact.initial), order(artifact.final))
        lines += [f"trans: {tracked_label(t.src)} -> {tracked_label(t.dst)} "
                  f"[{format_equations(t.eqs)}]" for t in sorted(artifact.transitions)]
    elif isinstance(artifact, Fsuba):
        lines = _head("fsuba", artifact.registers, sorted(artifact.states),
                      [artifact.initial], sorted(artifact.final))
        lines += [f"trans: {t}" for t in sorted(artifact.transitions)]
    elif isinstance(artifact, RegisterAutomaton):
        lines = _head("regaut", artifact.registers, sorted(artifact.states),
                      sorted(artifact.initial), sorted(artifact.final))
        lines += [f"trans: {t}" for t in sorted(artifact.transitions)]
    else:
        raise TypeError(f"cannot print {type(artifact).__name__}")
    return "\n".join(lines) + "\n"


def _control_key(c):
    return c[0], sorted(c[1])


def _head(kind, m, states, initial, final):
    return [f"kind: {kind}", f"registers: {m}", "states: " + " ".join(states),
            "initial: " + " ".join(initial), "final: " + " ".join(final)]


def kind_of(artifact) -> str:
    if isinstance(artifact, Nofa):
        return "nofa" if artifact.semantics == EXACT else "nofra"
    if isinstance(artifact, TrackedNofra):
        return "tracked"
    if isinstance(artifact, Fsuba):
        return "fsuba"
    if isinstance(artifact, RegisterAutomaton):
        return "regaut"
    if isinstance(artifact, Formula):
        return "mso"
    return "word"
