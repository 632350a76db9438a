"""Provenance graphs read as structural causal models.

The modules, bottom-up:

* :mod:`provgraph` -- graphs, interpretations, validation, evaluation, JSON I/O
* :mod:`causal` -- acyclic structural causal models and interventions
* :mod:`translate` -- a labeled graph as a causal situation
* :mod:`hpcause` -- Halpern-Pearl weak and actual causes
* :mod:`opmrules` -- OPM inference rules and their causal audit
* :mod:`slp` -- a straight-line program language with provenance semantics
* :mod:`approx` -- approximation levels and predictive power
"""

from .causal import CausalModel, CausalSituation, Equation, causal_function, intervene, solve
from .domain import Domain
from .errors import ProvCauseError
from .hpcause import (CauseQuery, enumerate_actual_causes, is_actual_cause, is_part_of_actual_cause,
                      is_weak_cause)
from .opmrules import audit, check_conjecture, infer
from .provgraph import (Interpretation, ProvGraph, evaluate, functional_semantics, read_graph, validate,
                        write_graph)
from .translate import TranslationOptions, to_causal

__version__ = "0.1.0"

__all__ = [
    "CausalModel", "CausalSituation", "CauseQuery", "Domain", "Equation", "Interpretation",
    "ProvCauseError", "ProvGraph", "TranslationOptions", "audit", "causal_function",
    "check_conjecture", "enumerate_actual_causes", "evaluate", "functional_semantics", "infer",
    "intervene", "is_actual_cause", "is_part_of_actual_cause", "is_weak_cause", "read_graph",
    "solve", "to_causal", "validate", "write_graph",
]
