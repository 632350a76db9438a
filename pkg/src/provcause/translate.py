"""Read a labeled provenance graph as a causal situation ``(M_G, sigma_G)``.

Every process and every artifact becomes an endogenous variable named by its
node id. A generated artifact copies the value of its generating process; a
process applies its interpretation function to the artifacts it used. Each
input artifact copies its own exogenous variable ``U_<id>``, so inputs can be
intervened on like any other node. With fault terms enabled, every process
gains one more exogenous parent ``U_<process id>`` that is folded into its
output by the fault combiner.
"""

from __future__ import annotations

from dataclasses import dataclass

from .causal import CausalModel, CausalSituation, Equation, inconsistencies
from .domain import Value
from .errors import EvaluationError, FunctionSpecError
from .functions import Builtin, Faulted
from .provgraph import Interpretation, ProvGraph, validate

EXOGENOUS_PREFIX = "U_"


@dataclass(frozen=True)
class TranslationOptions:
    fault_terms: bool = False
    fault_combiner: str = "xor"


@dataclass(frozen=True)
class Translation:
    situation: CausalSituation
    consistent: bool
    inconsistent_nodes: tuple[str, ...]

    @property
    def model(self) -> CausalModel:
        return self.situation.model

    @property
    def valuation(self) -> dict:
        return dict(self.situation.valuation)


def exogenous_name(node_id: str) -> str:
    return EXOGENOUS_PREFIX + node_id


def causal_model(graph: ProvGraph, interp: Interpretation,
                 opts: TranslationOptions = TranslationOptions()) -> CausalModel:
    """``M_G`` only; needs no labels."""
    problems = validate(graph, interp)
    if problems:
        raise EvaluationError("invalid graph: " + "; ".join(v.message for v in problems))
    domain = graph.domain
    combiner = None
    if opts.fault_terms:
        try:
            combiner = Builtin(opts.fault_combiner, 2, domain)
        except FunctionSpecError as exc:
            raise FunctionSpecError(f"fault combiner: {exc}") from None
    exogenous = [exogenous_name(v) for v in graph.inputs]
    equations: dict[str, Equation] = {}
    copy = Builtin("copy", 1, domain)
    for v in graph.inputs:
        equations[v] = Equation((exogenous_name(v),), copy)
    names = {p.id: p.name for p in graph.processes}
    for p in sorted(names):
        fn = interp[names[p]]
        parents = tuple(graph.uses_of(p))
        if combiner is not None:
            exogenous.append(exogenous_name(p))
            equations[p] = Equation(parents + (exogenous_name(p),), Faulted(fn, combiner))
        else:
            equations[p] = Equation(parents, fn)
    for a in sorted(graph.artifact_ids):
        if a not in graph.inputs:
            equations[a] = Equation((graph.generator_of(a),), copy)
    return CausalModel(domain, tuple(exogenous), equations)


def to_causal(graph: ProvGraph, interp: Interpretation,
              opts: TranslationOptions = TranslationOptions()) -> Translation:
    """``(M_G, sigma_G)`` from the artifact labels.

    Process values are computed from the labels of the artifacts they used.
    Labels that contradict an equation are kept and reported, not repaired.
    """
    model = causal_model(graph, interp, opts)
    labels = graph.labels()
    unlabeled = [a for a, v in labels.items() if v is None]
    if unlabeled:
        raise EvaluationError(f"artifacts without labels: {unlabeled}")
    sigma: dict[str, Value] = {}
    for v in graph.inputs:
        sigma[exogenous_name(v)] = labels[v]
    if opts.fault_terms:
        for p in graph.process_ids:
            sigma[exogenous_name(p)] = graph.domain.default
    sigma.update(labels)
    for p in graph.process_ids:
        sigma[p] = model.equations[p](sigma)
    situation = CausalSituation(model, sigma)
    bad = tuple(inconsistencies(situation))
    return Translation(situation, not bad, bad)


def round_trip(graph: ProvGraph, interp: Interpretation) -> bool:
    """True iff solving ``M_G`` from the input labels reproduces every label."""
    translation = to_causal(graph, interp)
    solved = translation.model.solve(translation.situation.context)
    return all(solved[a] == value for a, value in graph.labels().items())
