from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st
from oracles import naive_solve

from provcause.causal import (CausalModel, CausalSituation, Equation, causal_function, intervene,
                              is_consistent, lint, model_to_json, read_model, write_model)
from provcause.errors import InterventionError, ModelError, SchemaError
from provcause.fixtures import BOOL, cake_graph, cake_interpretation, const_situation
from provcause.functions import Builtin, Constant
from provcause.generators import random_model
from provcause.translate import TranslationOptions, causal_model


@pytest.fixture
def cake_model():
    return causal_model(cake_graph(), cake_interpretation(), TranslationOptions(fault_terms=True))


def cake_context(ingredients=1, u3=0):
    ctx = {f"U_{v}": ingredients for v in ("Water", "Sugar", "Eggs", "Flour", "Butter", "Pan")}
    ctx.update({"U_mixing": 0, "U_pouring": 0, "U_baking": u3, "U_cooling": 0})
    return ctx


class TestSolve:
    def test_cake(self, cake_model):
        assert cake_model.solve(cake_context())["Cake"] == 1

    def test_bake_fault(self, cake_model):
        values = cake_model.solve(cake_context(u3=1))
        assert values["Bake"] == 0 and values["Cake"] == 0

    def test_no_endogenous(self):
        model = CausalModel(BOOL, ("U",), {})
        assert model.solve({"U": 1}) == {"U": 1}

    def test_missing_context(self, cake_model):
        with pytest.raises(ModelError):
            cake_model.solve({})

    def test_cycles_rejected(self):
        copy = Builtin("copy", 1, BOOL)
        with pytest.raises(ModelError):
            CausalModel(BOOL, (), {"A": Equation(("B",), copy), "B": Equation(("A",), copy)})

    def test_unknown_parent_and_arity(self):
        with pytest.raises(ModelError):
            CausalModel(BOOL, (), {"A": Equation(("Z",), Builtin("copy", 1, BOOL))})
        with pytest.raises(ModelError):
            CausalModel(BOOL, ("U",), {"A": Equation(("U",), Builtin("and", 2, BOOL))})


class TestIntervene:
    def test_mix_zero(self, cake_model):
        values = intervene(cake_model, {"Mix": 0}).solve(cake_context())
        assert (values["Batter"], values["Bake"], values["Cake"]) == (0, 0, 0)

    def test_empty_is_identity(self, cake_model):
        assert intervene(cake_model, {}) is cake_model

    def test_idempotent_and_last_wins(self, cake_model):
        once = intervene(cake_model, {"Mix": 0})
        assert intervene(once, {"Mix": 0}) == once
        assert intervene(once, {"Mix": 1}) == intervene(cake_model, {"Mix": 1})

    def test_commute(self, cake_model):
        a = intervene(intervene(cake_model, {"Mix": 0}), {"Pan": 1})
        b = intervene(intervene(cake_model, {"Pan": 1}), {"Mix": 0})
        assert a.canonical() == b.canonical()

    def test_original_unchanged(self, cake_model):
        intervene(cake_model, {"Mix": 0})
        assert cake_model.solve(cake_context())["Mix"] == 1

    def test_exogenous_refused(self, cake_model):
        with pytest.raises(InterventionError):
            intervene(cake_model, {"U_Water": 0})
        with pytest.raises(InterventionError):
            intervene(cake_model, {"Nope": 0})


class TestConsistency:
    def test_solved_is_consistent(self, cake_model):
        assert is_consistent(CausalSituation(cake_model, cake_model.solve(cake_context())))

    def test_flipped_cake(self, cake_model):
        values = cake_model.solve(cake_context())
        values["Cake"] = 0
        assert not is_consistent(CausalSituation(cake_model, values))

    def test_constants(self):
        model = CausalModel(BOOL, (), {"A": Equation((), Constant(1))})
        assert is_consistent(CausalSituation(model, {"A": 1}))


class TestCausalFunction:
    def test_examples(self, cake_model):
        f = causal_function(cake_model)
        assert f(cake_context())["Cake"] == 1
        assert f(cake_context(), {"Mix": 0})["Mix"] == 0
        assert f(cake_context(ingredients=0), {"Cake": 1})["Cake"] == 1

    def test_intervention_on_exogenous(self, cake_model):
        with pytest.raises(InterventionError):
            causal_function(cake_model)(cake_context(), {"U_Pan": 1})


def test_lint_flags_idle_parent():
    (warning,) = lint(const_situation().model)
    assert (warning.variable, warning.parent) == ("Out", "X")


def test_model_file_round_trip(cake_model):
    again = read_model(write_model(cake_model))
    assert model_to_json(again) == model_to_json(cake_model)
    assert again.solve(cake_context()) == cake_model.solve(cake_context())


def test_model_file_schema():
    with pytest.raises(SchemaError):
        read_model('{"domain": {"kind": "bool"}, "exogenous": [], "endogenous": [], "extra": 1}')


models = st.integers(0, 100_000).map(lambda s: random_model(random.Random(s), max_endogenous=4))


def contexts(model):
    for bits in itertools.product((0, 1), repeat=len(model.exogenous)):
        yield dict(zip(model.exogenous, bits))


@settings(max_examples=60, deadline=None)
@given(models)
def test_solution_is_the_unique_consistent_extension(model):
    names = list(model.equations)
    for ctx in contexts(model):
        solved = model.solve(ctx)
        assert solved == naive_solve(model, ctx)
        consistent = []
        for bits in itertools.product((0, 1), repeat=len(names)):
            valuation = {**ctx, **dict(zip(names, bits))}
            if is_consistent(CausalSituation(model, valuation)):
                consistent.append(valuation)
        assert consistent == [solved]


@settings(max_examples=60, deadline=None)
@given(models, st.data())
def test_containment_and_locality(model, data):
    names = sorted(model.equations)
    chosen = data.draw(st.lists(st.sampled_from(names), unique=True, max_size=len(names)))
    tau = {x: data.draw(st.sampled_from((0, 1))) for x in chosen}
    f = causal_function(model)
    affected = model.descendants(chosen) | set(chosen)
    for ctx in contexts(model):
        after, before = f(ctx, tau), f(ctx)
        assert all(after[x] == v for x, v in tau.items())
        assert all(after[x] == before[x] for x in names if x not in affected)
