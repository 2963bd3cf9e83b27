"""Modal interface automata with input refusal: refinement, conformance and operators."""

from .completion import demonic_completion
from .compose import Mode, composable, hide, illegal_states, parallel_compose, parallel_product
from .conformance import (
    ConformanceVerdict, InputEnablednessWarning, ioco_may, irioco, suspension_automaton,
)
from .conjunction import conjoin, conjunctive_product, inconsistent_states
from .iofmt import ParseError, dump, load, parse, serialize, to_dot
from .isomorphism import find_isomorphism, isomorphic
from .model import (
    DELTA, MAY, MUST, PHI, TAU, AlphabetMismatch, Edge, InvalidAutomaton, IrMia, Modality, Rel,
    build, validate,
)
from .quotient import impossible_states, pseudo_quotient, quotient, quotient_pair_check
from .refinement import RefinementVerdict, refines
from .semantics import after, init_set, input_enabledness, out_set, quiescent, weak_closure

__all__ = [
    "AlphabetMismatch", "ConformanceVerdict", "DELTA", "Edge", "InputEnablednessWarning",
    "InvalidAutomaton", "IrMia", "MAY", "MUST", "Modality", "Mode", "PHI", "ParseError",
    "Rel", "RefinementVerdict", "TAU", "after", "build", "composable", "conjoin",
    "conjunctive_product", "demonic_completion", "dump", "find_isomorphism", "hide",
    "illegal_states", "impossible_states", "inconsistent_states", "init_set",
    "input_enabledness", "ioco_may", "irioco", "isomorphic", "load", "out_set",
    "parallel_compose", "parallel_product", "parse", "pseudo_quotient", "quiescent",
    "quotient", "quotient_pair_check", "refines", "serialize", "suspension_automaton",
    "to_dot", "validate", "weak_closure",
]
