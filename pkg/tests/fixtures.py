"""Hand-built automata shared by the tests."""
import random
from pathlib import Path

from posdata.core import Nofa
from posdata.oracle import random_nofa
from posdata.transforms import (AFTER, BEFORE, INPUT, BEq, BTrue, Fsuba,
                                RegisterAutomaton, Slot)

DATA = Path(__file__).parent / "data"

D = Nofa(["s0", "s1", "f"], 1, [("s0", ".=1", "s1"), ("s1", "", "f")], ["s0"], ["f"])

L1 = Nofa(["s", "h", "f"], 1, [
    ("s", "1=1", "s"),
    ("s", ".=1", "h"),
    ("h", "1=1", "h"),
    ("h", "1=., .=1, 1=1", "f"),
    ("f", "", "f"),
    ("f", "1=.", "f"),
], ["s"], ["f"])

G = Nofa(["g0", "g1", "g2"], 1, [("g0", "", "g1"), ("g1", "1=.", "g2")], ["g0"], ["g2"])

SWAP = Nofa(["j", "k"], 2, [("j", "1=2, 2=1", "k")], ["j"], ["k"])

# last letter new: guess it up front, then read only other letters
L0 = Nofa(["s", "f"], 1, [("s", "1=1", "s"), ("s", "1=.", "f")], ["s"], ["f"])

# accepts the empty word and words whose letters all differ from the first
EPS = Nofa(["q", "p"], 1, [("q", ".=1", "p"), ("p", "1=1", "p")], ["q"], ["q", "p"])

FSUBA_L1 = Fsuba(["s", "h", "f"], 2, [
    ("s", 1, {1}, "s"),
    ("s", 1, set(), "h"),
    ("h", 2, {2}, "h"),
    ("h", 1, set(), "f"),
    ("f", 2, {2}, "f"),
], "s", ["f"])

STORE_MATCH = RegisterAutomaton(["c0", "c1", "c2"], 1, [
    ("c0", BEq(Slot(INPUT), Slot(AFTER, 1)), "c1"),
    ("c1", BEq(Slot(BEFORE, 1), Slot(INPUT)), "c2"),
], ["c0"], ["c2"])

UNIVERSAL = RegisterAutomaton(["c"], 1, [("c", BTrue(), "c")], ["c"], ["c"])

HAND = [D, L1, G, SWAP, L0, EPS]


def corpus(n=50, seed=2024, **kw):
    """Random well-formed automata (control <= 3, registers <= 2,
    transitions <= 6 unless overridden)."""
    rng = random.Random(seed)
    return [random_nofa(rng, **kw) for _ in range(n)]
