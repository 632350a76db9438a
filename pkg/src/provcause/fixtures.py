"""Canonical small graphs, models and programs used by tests and the CLI demos."""

from __future__ import annotations

from .causal import CausalModel, CausalSituation, Equation
from .domain import Domain
from .functions import Builtin, Constant, Table
from .provgraph import Artifact, Interpretation, ProvGraph, Process, label

BOOL = Domain.boolean()

CAKE_INGREDIENTS = ("Water", "Sugar", "Eggs", "Flour", "Butter")
CAKE_INPUTS = CAKE_INGREDIENTS + ("Pan",)
CAKE_STEPS = (  # process id, process name, used artifacts, generated artifact
    ("mixing", "mix", CAKE_INGREDIENTS, "Mix"),
    ("pouring", "pour", ("Mix",), "Batter"),
    ("baking", "bake", ("Batter", "Pan"), "Bake"),
    ("cooling", "cool", ("Bake",), "Cake"),
)


def cake_interpretation() -> Interpretation:
    return Interpretation.from_specs(BOOL, [
        ("mix", 5, {"builtin": "and"}),
        ("pour", 1, {"builtin": "copy"}),
        ("bake", 2, {"builtin": "and"}),
        ("cool", 1, {"builtin": "copy"}),
    ])


def _build(domain, inputs, steps, result) -> ProvGraph:
    artifacts = [Artifact(v, None, True) for v in inputs]
    artifacts += [Artifact(out, None, False) for _, _, _, out in steps]
    processes = [Process(pid, name) for pid, name, _, _ in steps]
    used = [(pid, a, i) for pid, _, uses, _ in steps for i, a in enumerate(uses, 1)]
    generated = [(out, pid) for pid, _, _, out in steps]
    return ProvGraph(domain, tuple(artifacts), tuple(processes), tuple(used), tuple(generated),
                     result, tuple(inputs))


def cake_graph(inputs: tuple = (1,) * 6) -> ProvGraph:
    """The provenance-of-a-cake graph, labeled by evaluation at ``inputs``."""
    graph = _build(BOOL, CAKE_INPUTS, CAKE_STEPS, "Cake")
    return label(graph, cake_interpretation(), inputs)


def cake_equations(ingredients: dict, faults: dict) -> dict:
    """Direct evaluation of the four cake equations (fault terms xor-ed in)."""
    mix = int(all(ingredients[i] for i in CAKE_INGREDIENTS)) ^ faults["U1"]
    batter = mix ^ faults["U2"]
    bake = (batter & ingredients["Pan"]) ^ faults["U3"]
    cake = bake ^ faults["U4"]
    return {"Mix": mix, "Batter": batter, "Bake": bake, "Cake": cake}


CONST_GATE_STEPS = (("gate", "one", ("x",), "out"),)


def const_gate_interpretation() -> Interpretation:
    return Interpretation.from_specs(BOOL, [("one", 1, {"builtin": "const-1"})])


def const_gate_graph(x: int = 1) -> ProvGraph:
    """A process that reads ``x`` but always outputs 1."""
    graph = _build(BOOL, ("x",), CONST_GATE_STEPS, "out")
    return label(graph, const_gate_interpretation(), (x,))


OR_GATE_STEPS = (("join", "or", ("X", "Y"), "Out"),)


def or_gate_interpretation() -> Interpretation:
    return Interpretation.from_specs(BOOL, [("or", 2, {"builtin": "or"})])


def or_gate_graph(x: int = 1, y: int = 1) -> ProvGraph:
    graph = _build(BOOL, ("X", "Y"), OR_GATE_STEPS, "Out")
    return label(graph, or_gate_interpretation(), (x, y))


def _situation(model: CausalModel, context: dict) -> CausalSituation:
    return CausalSituation(model, model.solve(context))


def or_situation(x: int = 1, y: int = 1) -> CausalSituation:
    """``Out := X or Y`` with ``X``, ``Y`` copied from exogenous inputs."""
    copy = Builtin("copy", 1, BOOL)
    model = CausalModel(BOOL, ("UX", "UY"), {
        "X": Equation(("UX",), copy),
        "Y": Equation(("UY",), copy),
        "Out": Equation(("X", "Y"), Builtin("or", 2, BOOL)),
    })
    return _situation(model, {"UX": x, "UY": y})


def const_situation(x: int = 1) -> CausalSituation:
    """``Out := 1`` with a declared (but idle) parent ``X``."""
    model = CausalModel(BOOL, ("UX",), {
        "X": Equation(("UX",), Builtin("copy", 1, BOOL)),
        "Out": Equation(("X",), Constant(1, 1)),
    })
    return _situation(model, {"UX": x})


def nor_situation(x: int = 1, y: int = 1) -> CausalSituation:
    """``Out := (X xor 1) and (Y xor 1)``: Out is 1 only when both are 0."""
    copy = Builtin("copy", 1, BOOL)
    nor = Table.from_mapping(BOOL, 2, {(a, b): int(a == 0 and b == 0) for a in (0, 1) for b in (0, 1)})
    model = CausalModel(BOOL, ("UX", "UY"), {
        "X": Equation(("UX",), copy),
        "Y": Equation(("UY",), copy),
        "Out": Equation(("X", "Y"), nor),
    })
    return _situation(model, {"UX": x, "UY": y})


AFFINE_PROGRAM = "input x; y := add(x, 1); z := mul(y, 2); return z"
POWER_PROGRAM = "input u, x, y; s := add(x, y); acc := 1; repeat u { acc := mul(acc, s); } return acc"
BOOLEAN_PROGRAM = "input a, b, c; d := and(a, b); e := or(d, c); f := xor(e, a); return f"
GUARDED_PROGRAM = "input g, x; y := if g then add(x, 1) else mul(x, 2); z := add(y, x); return z"
