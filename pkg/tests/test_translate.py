from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from provcause.errors import FunctionSpecError
from provcause.fixtures import cake_graph, cake_interpretation
from provcause.generators import random_graph
from provcause.provgraph import functional_semantics
from provcause.translate import TranslationOptions, causal_model, exogenous_name, round_trip, to_causal

FAULTS = TranslationOptions(fault_terms=True)


def test_cake_is_consistent():
    t = to_causal(cake_graph(), cake_interpretation())
    assert t.consistent and t.inconsistent_nodes == ()
    assert t.valuation["Cake"] == 1


def test_hand_edited_label_is_flagged_not_repaired():
    g = cake_graph().with_labels({"Cake": 0})
    t = to_causal(g, cake_interpretation())
    assert not t.consistent
    assert t.inconsistent_nodes == ("Cake",)
    assert t.valuation["Cake"] == 0
    assert not round_trip(g, cake_interpretation())


def test_round_trip_cake():
    assert round_trip(cake_graph(), cake_interpretation())


def test_fault_terms_match_the_cake_model():
    model = causal_model(cake_graph(), cake_interpretation(), FAULTS)
    assert len(model.exogenous) == 6 + 4
    for pid in ("mixing", "pouring", "baking", "cooling"):
        assert exogenous_name(pid) in model.parents(pid)
    t = to_causal(cake_graph(), cake_interpretation(), FAULTS)
    assert t.consistent
    assert all(t.valuation[exogenous_name(p)] == 0 for p in ("mixing", "pouring", "baking", "cooling"))


def test_fault_combiner_must_fit_the_domain():
    with pytest.raises(FunctionSpecError):
        causal_model(cake_graph(), cake_interpretation(), TranslationOptions(True, "nand"))


def test_causal_graph_is_the_edge_relation():
    g = cake_graph()
    model = causal_model(g, cake_interpretation())
    endogenous_edges = {(p, x) for p, x in model.edges() if p in model.equations}
    provenance = {(a, p) for p, a, _ in g.used} | {(p, a) for a, p in g.generated}
    assert endogenous_edges == provenance


graphs = st.integers(0, 100_000).map(lambda s: random_graph(random.Random(s), max_inputs=8, max_nodes=24))


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_translation_agrees_with_evaluation(pair):
    graph, interp = pair
    t = to_causal(graph, interp)
    assert t.consistent
    f = functional_semantics(graph, interp)
    for u in itertools.product((0, 1), repeat=len(graph.inputs)):
        context = {exogenous_name(v): x for v, x in zip(graph.inputs, u)}
        assert t.model.solve(context)[graph.result] == f(u)


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_exogenous_counts(pair):
    graph, interp = pair
    assert len(causal_model(graph, interp).exogenous) == len(graph.inputs)
    assert len(causal_model(graph, interp, FAULTS).exogenous) == len(graph.inputs) + len(graph.processes)
