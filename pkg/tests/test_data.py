from __future__ import annotations

import itertools
from pathlib import Path

import pytest

from provcause.causal import read_model, write_model
from provcause.fixtures import (AFFINE_PROGRAM, POWER_PROGRAM, cake_graph, cake_interpretation, const_gate_graph,
                                const_gate_interpretation, or_gate_graph, or_gate_interpretation)
from provcause.provgraph import read_graph, read_interpretation, write_graph
from provcause.slp import parse
from provcause.translate import causal_model

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.mark.parametrize("name, graph", [
    ("cake.json", cake_graph()), ("constgate.json", const_gate_graph()), ("orgate.json", or_gate_graph()),
])
def test_graph_files_are_canonical(name, graph):
    raw = (DATA / name).read_bytes()
    assert raw == write_graph(graph)
    assert write_graph(read_graph(raw)) == raw


@pytest.mark.parametrize("name, interp", [
    ("cake-ops.json", cake_interpretation()), ("ops.json", const_gate_interpretation()),
    ("orgate-ops.json", or_gate_interpretation()),
])
def test_interpretation_files_agree_with_fixtures(name, interp):
    loaded = read_interpretation((DATA / name).read_bytes(), interp.domain)
    assert set(loaded.ops) == set(interp.ops)
    for op in interp.ops.values():
        assert loaded.arity(op.name) == op.arity
        for args in itertools.product(interp.domain.values, repeat=op.arity):
            assert loaded[op.name](args) == op.fn(args)


def test_model_file():
    raw = (DATA / "cake-model.json").read_bytes()
    assert raw == write_model(causal_model(cake_graph(), cake_interpretation()))
    assert write_model(read_model(raw)) == raw


def test_programs():
    assert parse((DATA / "affine.slp").read_text()) == parse(AFFINE_PROGRAM)
    assert parse((DATA / "power.slp").read_text()) == parse(POWER_PROGRAM)
