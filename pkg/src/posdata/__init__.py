"""Automata over infinite alphabets that recognize positive data languages."""
from .core import (CONSISTENCY, EXACT, Equation, Nofa, SpecSyntaxError,
                   Transition, in_reg, induced_abstraction, is_consistent,
                   parse_equations, realize, reg_in, reg_reg,
                   validate_automaton, validate_equations)
from .semantics import (AbstractRun, accepts, fsuba_accepts, nofa_accepts,
                        nofra_accepts, nofra_accepts_concrete, regaut_accepts,
                        run_predicates, sample_language, tracked_accepts)
from .transforms import (Fsuba, RegisterAutomaton, TrackedNofra, deguess,
                         positive_closure, rigidify, to_fsuba,
                         to_positive_regaut)
from .logic import automaton_to_mso, eval_mso, is_positive_formula, parse_formula
from .formats import ValidationError, parse_spec, parse_word, print_spec
from .oracle import bounded_equiv, bounded_positivity_check, closure_oracle

__version__ = "0.1.0"
