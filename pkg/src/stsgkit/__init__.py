"""Stochastic tree-substitution grammars: forest parsing, exact and
approximate disambiguation, and 3SAT hardness gadgets."""

from .disambig import (collapse_transform, decide_mpp, decide_mppwg, decide_mps,
                       monte_carlo_mpp, mpd, mpd_as_mpp_proxy, mpp_exact, mps_exact,
                       parse_probability, sentence_probability)
from .errors import StsgError
from .forest import (DerivationForest, build_forest, enumerate_derivations,
                     enumerate_parses)
from .grammar import (Derivation, ElementaryTree, Stsg, derivation_probability, derive,
                      leftmost_substitute, read_grammar, validate_grammar, write_grammar,
                      yield_of)
from .reduction import (Cnf3Formula, ReductionOutput, build_mpp_reduction,
                        build_mppwg_reduction, classify_derivation, flatten_to_scfg,
                        read_dimacs)
from .satoracle import brute_force_sat, verify_answer_preservation
from .trees import Tree, parse_bracket
from .wordgraph import WordGraph, read_wordgraph, sentences_of

__version__ = "0.1.0"
