"""Command line interface: ``posdata COMMAND FILE ...``.

Exit codes: 0 accept (or equal, or ok), 1 reject (or differs), 2 error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .core import Nofa, SpecSyntaxError
from .formats import (ValidationError, format_word, kind_of, parse_spec,
                      parse_word, print_spec)
from .logic import Formula, automaton_to_mso, eval_mso, so_quantifier_count
from .oracle import bounded_equiv, enumerate_runs_membership
from .semantics import accepts, sample_language
from .transforms import (deguess, positive_closure, rigidify, to_fsuba,
                         to_positive_regaut)

OPS = ("close", "deguess", "rigidify", "fsuba", "regaut", "mso")


class UsageError(Exception):
    pass


def load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text)


def _automaton(path):
    a = load(path)
    if isinstance(a, (tuple, Formula)):
        raise UsageError(f"{path} holds a {kind_of(a)}, not an automaton")
    return a


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_so_bound(phi, w, bound):
    if so_quantifier_count(phi) and len(w) > bound:
        raise UsageError(f"word length {len(w)} exceeds --max-so-len {bound} "
                         "for a formula with second-order quantifiers")


def cmd_validate(args):
    a = load(args.file)
    print(f"ok: {kind_of(a)}")
    return 0


def cmd_member(args):
    a = load(args.file)
    if isinstance(a, tuple):
        raise UsageError(f"{args.file} holds a word, not an automaton or formula")
    w, _ = parse_word(args.word)
    if isinstance(a, Formula):
        _check_so_bound(a, w, args.max_so_len)
    ok = accepts(a, w)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def cmd_eval(args):
    phi = load(args.file)
    if not isinstance(phi, Formula):
        raise UsageError(f"{args.file} holds a {kind_of(phi)}, not a formula")
    w, _ = parse_word(args.word)
    _check_so_bound(phi, w, args.max_so_len)
    try:
        ok = eval_mso(phi, w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print("accept" if ok else "reject")
    return 0 if ok else 1


def transform(a: Nofa, op: str):
    # rigidify logs a warning above four registers
    if op == "close":
        return positive_closure(a)
    if op == "deguess":
        return deguess(a)
    if op == "rigidify":
        return rigidify(a)
    if op == "fsuba":
        return to_fsuba(rigidify(a))
    if op == "regaut":
        return to_positive_regaut(a)
    return automaton_to_mso(a)


def cmd_transform(args):
    a = _automaton(args.file)
    if not isinstance(a, Nofa):
        raise UsageError(f"transform needs a nofa or nofra file, got {kind_of(a)}")
    _write(print_spec(transform(a, args.op)), args.output)
    return 0


def _atoms(text):
    atoms, names = parse_word(text)
    if not names:
        raise UsageError("--atoms needs at least one atom")
    return list(range(len(names))), names


def cmd_sample(args):
    a = load(args.file)
    ids, names = _atoms(args.atoms)
    for w in sample_language(a, ids, args.max_len):
        print(format_word(w, names) if w else "<empty>")
    return 0


def cmd_compare(args):
    a, b = load(args.file1), load(args.file2)
    ids, names = _atoms(args.atoms)
    w = bounded_equiv(a, b, ids, args.max_len)
    if w is None:
        print("equal")
        return 0
    text = format_word(w, names) if w else "<empty>"
    print(f"differs on: {text} (first: {accepts(a, w)}, second: {accepts(b, w)})")
    return 1


def cmd_oracle(args):
    a = _automaton(args.file)
    w, _ = parse_word(args.word)
    pool = 2 * a.registers if args.pool is None else args.pool
    ok = enumerate_runs_membership(a, w, pool)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="posdata", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("member", help="membership under the file's kind")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.add_argument("--max-so-len", type=int, default=6)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("transform", help="apply a construction to a nofa file")
    p.add_argument("file")
    p.add_argument("--op", required=True, choices=OPS)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("sample", help="list accepted words")
    p.add_argument("file")
    p.add_argument("--atoms", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("compare", help="bounded language comparison")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--atoms", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="brute-force membership")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.add_argument("--pool", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="evaluate an MSO sentence on a word")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.add_argument("--max-so-len", type=int, default=6)
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except SpecSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
    except ValidationError as exc:
        for e in exc.errors:
            print(f"invalid: {e}", file=sys.stderr)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
