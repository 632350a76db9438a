from __future__ import annotations

import itertools
import json
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from provcause.domain import Domain
from provcause.errors import EvaluationError, ParseError, SchemaError
from provcause.fixtures import BOOL, cake_graph, cake_interpretation
from provcause.generators import random_graph
from provcause.provgraph import (Artifact, Evaluator, Interpretation, ProvGraph, Process, evaluate,
                                 functional_semantics, graph_to_json, read_graph, read_interpretation,
                                 topological_order, validate, write_graph, write_interpretation)


def kinds(graph, interp=None):
    return {v.kind for v in validate(graph, interp)}


class TestValidate:
    def test_cake_is_valid(self):
        assert validate(cake_graph(), cake_interpretation()) == []

    def test_artifact_to_artifact_edge(self):
        g = cake_graph()
        bad = replace(g, used=g.used + (("Water", "Sugar", 1),))
        (violation,) = [v for v in validate(bad) if v.kind == "bipartite"]
        assert set(violation.ids) == {"Water", "Sugar"}

    def test_missing_port_breaks_sortedness(self):
        g = cake_graph()
        bad = replace(g, used=tuple(e for e in g.used if e != ("mixing", "Butter", 5)))
        assert "sorted" in kinds(bad, cake_interpretation())

    def test_sortedness_needs_an_interpretation(self):
        g = cake_graph()
        bad = replace(g, used=tuple(e for e in g.used if e != ("mixing", "Butter", 5)))
        assert "sorted" not in kinds(bad)

    def test_cycle(self):
        g = cake_graph()
        bad = replace(g, used=g.used + (("mixing", "Cake", 6),))
        assert "cycle" in kinds(bad)

    def test_generation_rules(self):
        g = cake_graph()
        assert "input-generated" in kinds(replace(g, generated=g.generated + (("Water", "mixing"),)))
        orphan = replace(g, artifacts=g.artifacts + (Artifact("Stray"),))
        assert "generation" in kinds(orphan)
        two = replace(g, generated=g.generated + (("Stray", "mixing"),), artifacts=orphan.artifacts)
        assert "functional" in kinds(two)

    def test_dangling_and_duplicates(self):
        g = cake_graph()
        assert "dangling-edge" in kinds(replace(g, used=g.used + (("ghost", "Water", 1),)))
        assert "duplicate-id" in kinds(replace(g, processes=g.processes + (Process("Water", "mix"),)))

    def test_unknown_operation_and_labels(self):
        g = cake_graph()
        assert "unknown-operation" in kinds(g, Interpretation(BOOL, {}))
        assert "label" in kinds(g.with_labels({"Cake": 3}))


class TestEvaluate:
    def test_cake_all_ones(self):
        assert evaluate(cake_graph(), cake_interpretation(), (1,) * 6).result == 1

    def test_cake_no_water(self):
        values = evaluate(cake_graph(), cake_interpretation(), (0, 1, 1, 1, 1, 1)).values
        assert values["Mix"] == 0 and values["Cake"] == 0

    def test_identity_graph(self):
        g = ProvGraph(BOOL, (Artifact("v", None, True),), (), (), (), "v", ("v",))
        f = functional_semantics(g, Interpretation(BOOL, {}))
        assert f.table() == {(0,): 0, (1,): 1}

    def test_apply_f(self):
        interp = Interpretation.from_specs(BOOL, [("f", 2, {"table": [["0", "0", "1"], ["0", "1", "0"],
                                                                       ["1", "0", "0"], ["1", "1", "1"]]})])
        g = ProvGraph(BOOL, (Artifact("a", None, True), Artifact("b", None, True), Artifact("out")),
                      (Process("p", "f"),), (("p", "a", 1), ("p", "b", 2)), (("out", "p"),), "out", ("a", "b"))
        f = functional_semantics(g, interp)
        assert f.table() == {u: interp["f"](u) for u in itertools.product((0, 1), repeat=2)}

    def test_input_errors(self):
        with pytest.raises(EvaluationError):
            evaluate(cake_graph(), cake_interpretation(), (1,) * 5)
        with pytest.raises(EvaluationError):
            evaluate(cake_graph(), cake_interpretation(), (2,) * 6)

    def test_invalid_graph_refused(self):
        g = cake_graph()
        with pytest.raises(EvaluationError):
            Evaluator(replace(g, used=g.used[:-1]), cake_interpretation())

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_order_independence(self, seed):
        rng = random.Random(seed)
        graph, interp = random_graph(rng, max_nodes=20)
        order = topological_order(graph)
        # a second, different topological order: reversed-tie-break Kahn's algorithm
        preds = {n: set() for n in order}
        for effect, cause in graph.edges():
            preds[effect].add(cause)
        other, ready = [], sorted((n for n in order if not preds[n]), reverse=True)
        while ready:
            n = ready.pop(0)
            other.append(n)
            for m in order:
                if n in preds[m]:
                    preds[m].discard(n)
                    if not preds[m] and m not in other and m not in ready:
                        ready.append(m)
            ready.sort(reverse=True)
        u = tuple(rng.choice((0, 1)) for _ in graph.inputs)
        a = evaluate(graph, interp, u, order)
        b = evaluate(graph, interp, u, other)
        assert a == b
        assert set(a.values) == set(graph.artifact_ids + graph.process_ids)

    def test_bad_order_rejected(self):
        g = cake_graph()
        with pytest.raises(EvaluationError):
            evaluate(g, cake_interpretation(), (1,) * 6, list(reversed(topological_order(g))))


class TestIO:
    def test_cake_counts(self):
        g = read_graph(write_graph(cake_graph()))
        assert len(g.artifacts) == 10 and len(g.processes) == 4

    def test_empty_artifacts(self):
        doc = {"domain": {"kind": "bool"}, "artifacts": [], "processes": [], "result": "x", "inputs": []}
        with pytest.raises(SchemaError, match="no result node"):
            read_graph(json.dumps(doc))

    def test_unknown_field(self):
        doc = graph_to_json(cake_graph())
        doc["agents"] = []
        with pytest.raises(SchemaError, match="unknown"):
            read_graph(json.dumps(doc))

    def test_parse_error_has_position(self):
        with pytest.raises(ParseError) as info:
            read_graph('{\n  "domain": ,\n}')
        assert info.value.line == 2

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_round_trip_is_byte_identical(self, seed):
        graph, _ = random_graph(random.Random(seed))
        once = write_graph(graph)
        assert write_graph(read_graph(once)) == once
        assert validate(read_graph(once)) == []

    def test_interpretation_round_trip(self):
        interp = cake_interpretation()
        again = read_interpretation(write_interpretation(interp), BOOL)
        g = cake_graph()
        for u in itertools.product((0, 1), repeat=6):
            assert evaluate(g, again, u) == evaluate(g, interp, u)

    def test_interpretation_table_row_count(self):
        doc = {"ops": [{"name": "f", "arity": 1, "fn": {"table": [["0", "1"]]}}]}
        with pytest.raises(SchemaError):
            read_interpretation(json.dumps(doc), BOOL)

    def test_enum_graph(self):
        d = Domain.enum(["lo", "hi"])
        g = ProvGraph(d, (Artifact("a", "hi", True), Artifact("b", "hi")), (Process("p", "id"),),
                      (("p", "a", 1),), (("b", "p"),), "b", ("a",))
        again = read_graph(write_graph(g))
        assert again.artifact("b").value == "hi"
