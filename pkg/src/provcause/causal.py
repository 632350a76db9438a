"""Deterministic acyclic structural causal models."""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .domain import Domain, Value
from .errors import FunctionSpecError, InterventionError, ModelError, SchemaError
from .functions import Constant, depends_on, make_function
from .provgraph import _expect_keys, _load_json, _string, dumps

Valuation = dict  # variable name -> value


@dataclass(frozen=True)
class Equation:
    parents: tuple[str, ...]
    fn: Any

    def __call__(self, values: Mapping[str, Value]) -> Value:
        return self.fn(tuple(values[p] for p in self.parents))


@dataclass(frozen=True)
class CausalModel:
    """Exogenous names, endogenous equations, and a shared finite domain.

    Models are values: ``intervene`` returns a new model and equality ignores
    declaration order.
    """

    domain: Domain
    exogenous: tuple[str, ...]
    equations: Mapping[str, Equation]
    _order: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _plan: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        names = list(self.exogenous) + list(self.equations)
        if len(set(names)) != len(names):
            raise ModelError("variable names must be unique across exogenous and endogenous")
        known = set(names)
        sorter = graphlib.TopologicalSorter()
        for x, eq in self.equations.items():
            for p in eq.parents:
                if p not in known:
                    raise ModelError(f"{x!r} has unknown parent {p!r}")
            if getattr(eq.fn, "arity", len(eq.parents)) != len(eq.parents):
                raise ModelError(f"{x!r}: function arity {eq.fn.arity} != {len(eq.parents)} parents")
            sorter.add(x, *[p for p in eq.parents if p in self.equations])
        try:
            order = tuple(sorter.static_order())
        except graphlib.CycleError as exc:
            raise ModelError(f"causal graph has a cycle: {' -> '.join(exc.args[1])}") from None
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_plan", tuple((x, self.equations[x].parents, self.equations[x].fn) for x in order))

    @property
    def endogenous(self) -> tuple[str, ...]:
        return tuple(self.equations)

    @property
    def order(self) -> tuple[str, ...]:
        """Endogenous variables, parents before children."""
        return self._order

    def parents(self, name: str) -> tuple[str, ...]:
        return self.equations[name].parents if name in self.equations else ()

    def edges(self) -> set[tuple[str, str]]:
        """Causal graph edges ``parent -> child``."""
        return {(p, x) for x, eq in self.equations.items() for p in eq.parents}

    def ancestors(self, name: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.parents(name))
        while stack:
            p = stack.pop()
            if p not in seen:
                seen.add(p)
                stack.extend(self.parents(p))
        return seen

    def descendants(self, names: Iterable[str]) -> set[str]:
        children: dict[str, list[str]] = {}
        for p, x in self.edges():
            children.setdefault(p, []).append(x)
        seen: set[str] = set()
        stack = list(names)
        while stack:
            n = stack.pop()
            for c in children.get(n, ()):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def solve(self, context: Mapping[str, Value], overrides: Mapping[str, Value] | None = None) -> Valuation:
        """Unique solution under ``context``; ``overrides`` act as an intervention."""
        missing = [u for u in self.exogenous if u not in context]
        if missing:
            raise ModelError(f"context does not assign exogenous {missing}")
        values = {u: context[u] for u in self.exogenous}
        if overrides:
            for x, parents, fn in self._plan:
                values[x] = overrides[x] if x in overrides else fn(tuple(values[p] for p in parents))
        else:
            for x, parents, fn in self._plan:
                values[x] = fn(tuple(values[p] for p in parents))
        return values

    def canonical(self) -> CausalModel:
        return CausalModel(self.domain, tuple(sorted(self.exogenous)),
                           {x: self.equations[x] for x in sorted(self.equations)})


def solve(model: CausalModel, context: Mapping[str, Value]) -> Valuation:
    return model.solve(context)


def intervene(model: CausalModel, settings: Mapping[str, Value]) -> CausalModel:
    """``M_[X:=x]``: each set variable gets no parents and a constant equation."""
    if not settings:
        return model
    for x, v in settings.items():
        if x in model.exogenous:
            raise InterventionError(f"cannot intervene on exogenous {x!r}")
        if x not in model.equations:
            raise InterventionError(f"unknown variable {x!r}")
        model.domain.check(v)
    equations = {
        x: Equation((), Constant(settings[x])) if x in settings else eq
        for x, eq in model.equations.items()
    }
    return CausalModel(model.domain, model.exogenous, equations)


@dataclass(frozen=True)
class CausalSituation:
    model: CausalModel
    valuation: Mapping[str, Value]

    @property
    def context(self) -> dict[str, Value]:
        return {u: self.valuation[u] for u in self.model.exogenous}


def inconsistencies(situation: CausalSituation) -> list[str]:
    """Endogenous variables whose equation does not hold under the valuation."""
    sigma = situation.valuation
    return [x for x, eq in situation.model.equations.items() if eq(sigma) != sigma[x]]


def is_consistent(situation: CausalSituation) -> bool:
    model, sigma = situation.model, situation.valuation
    if any(v not in sigma for v in list(model.exogenous) + list(model.equations)):
        raise ModelError("consistency needs a total valuation")
    return not inconsistencies(situation)


@dataclass(frozen=True)
class CausalFunction:
    """``[[M]]``: for each partial valuation tau, a map from contexts to valuations."""

    model: CausalModel

    @property
    def variables(self) -> tuple[str, ...]:
        return self.model.endogenous

    def __call__(self, context: Mapping[str, Value], tau: Mapping[str, Value] | None = None) -> Valuation:
        tau = tau or {}
        for x in tau:
            if x not in self.model.equations:
                raise InterventionError(f"intervention on non-endogenous {x!r}")
        return self.model.solve(context, tau)


def causal_function(model: CausalModel) -> CausalFunction:
    return CausalFunction(model)


@dataclass(frozen=True)
class LintWarning:
    variable: str
    parent: str

    def __str__(self) -> str:
        return f"{self.variable}: equation is constant in declared parent {self.parent}"


def lint(model: CausalModel) -> list[LintWarning]:
    """Declared parents the equation does not actually depend on."""
    warnings = []
    for x, eq in model.equations.items():
        for i, p in enumerate(eq.parents):
            if not depends_on(eq.fn, i, model.domain):
                warnings.append(LintWarning(x, p))
    return warnings


# --- model file I/O -----------------------------------------------------------


def read_model(data: bytes | str) -> CausalModel:
    obj = _load_json(data)
    _expect_keys(obj, {"domain", "exogenous", "endogenous"}, set(), "model")
    domain = Domain.from_json(obj["domain"])
    if not isinstance(obj["exogenous"], list) or not isinstance(obj["endogenous"], list):
        raise SchemaError("'exogenous' and 'endogenous' must be lists")
    exogenous = tuple(_string(u, "exogenous[]") for u in obj["exogenous"])
    equations: dict[str, Equation] = {}
    for i, e in enumerate(obj["endogenous"]):
        _expect_keys(e, {"id", "parents", "fn"}, set(), f"endogenous[{i}]")
        x = _string(e["id"], f"endogenous[{i}].id")
        if x in equations:
            raise SchemaError(f"endogenous variable {x!r} declared twice")
        parents = tuple(_string(p, f"endogenous[{i}].parents[]") for p in e["parents"])
        try:
            equations[x] = Equation(parents, make_function(e["fn"], len(parents), domain))
        except FunctionSpecError as exc:
            raise SchemaError(f"endogenous {x!r}: {exc}") from None
    try:
        return CausalModel(domain, exogenous, equations)
    except ModelError as exc:
        raise SchemaError(str(exc)) from None


def model_to_json(model: CausalModel) -> dict:
    return {
        "domain": model.domain.to_json(),
        "exogenous": list(model.exogenous),
        "endogenous": [
            {"id": x, "parents": list(eq.parents), "fn": eq.fn.to_spec()}
            for x, eq in model.equations.items()
        ],
    }


def write_model(model: CausalModel) -> bytes:
    return dumps(model_to_json(model)).encode("utf-8")


def valuation_to_json(domain: Domain, valuation: Mapping[str, Value]) -> dict:
    return {k: domain.render(v) for k, v in valuation.items()}


def parse_assignment(domain: Domain, items: Mapping[str, str]) -> dict[str, Value]:
    return {k: domain.parse(v) for k, v in items.items()}
