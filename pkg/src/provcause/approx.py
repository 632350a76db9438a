"""Pointwise, local and global approximation, and predictive power.

A semantics P maps each input tuple u to a provenance graph P(u). Read
functionally, P(u) predicts f at u' when evaluating P(u) at u' gives f(u').
Read causally, it predicts f at u' when the causal model of P(u), run in the
context u', agrees with the program's causal function at u' on every run
variable and under every intervention tau.

All checks are exhaustive with explicit budgets; an oversized space raises
:class:`BudgetExceeded` rather than being sampled.

Two exact routes decide the causal condition for one (u, u') pair:

``exhaustive``
    enumerate every tau literally, in order of size, then variables in run
    order, then values in domain order. The first failing tau is reported.
``mechanism``
    compare, per run variable v, the reference equation of v with the model's
    equation for v after composing away every node that is not a run
    variable. Both systems are acyclic, so equal mechanisms give equal
    solutions under every tau, and a differing mechanism is exposed by the
    tau that fixes exactly the union of both parent sets.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .causal import CausalModel
from .domain import Domain, Value
from .errors import BudgetExceeded, ProvCauseError
from .provgraph import Evaluator, ProvGraph
from .slp import Run, Semantics, run
from .translate import causal_model, exogenous_name

FUNCTIONAL_LEVELS = ("pointwise", "global")
CAUSAL_LEVELS = ("pointwise", "local", "global")
STRATEGIES = ("auto", "exhaustive", "mechanism")
DEFAULT_BUDGET = 4096
DEFAULT_TAU_BUDGET = 1024

_VARIABLE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(@\d+)?")

Inputs = tuple


@dataclass(frozen=True)
class Counterexample:
    u: Inputs
    u_prime: Inputs
    tau: tuple[tuple[str, Value], ...]
    variable: str
    expected: Value
    got: Value | None

    def to_json(self, domain: Domain, names: Sequence[str]) -> dict:
        def point(values):
            return {n: domain.render(v) for n, v in zip(names, values)}

        return {
            "u": point(self.u),
            "uPrime": point(self.u_prime),
            "tau": {k: domain.render(v) for k, v in self.tau},
            "variable": self.variable,
            "expected": domain.render(self.expected),
            "got": None if self.got is None else domain.render(self.got),
        }


@dataclass(frozen=True)
class Verdict:
    mode: str
    level: str
    passed: bool
    counterexample: Counterexample | None = None
    checked: int = 0
    skipped: int = 0
    strategy: str | None = None

    def to_json(self, domain: Domain, names: Sequence[str]) -> dict:
        out: dict = {"mode": self.mode, "level": self.level, "pass": self.passed, "checked": self.checked}
        if self.strategy is not None:
            out["strategy"] = self.strategy
            out["skippedTau"] = self.skipped
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json(domain, names)
        return out


def program_variables(graph: ProvGraph) -> tuple[str, ...]:
    """Non-input artifacts named like run variables (auxiliary nodes contain ':')."""
    inputs = set(graph.inputs)
    return tuple(a.id for a in graph.artifacts if a.id not in inputs and _VARIABLE.fullmatch(a.id))


def structure_key(graph: ProvGraph) -> tuple:
    """Everything about a graph except its labels."""
    return (
        tuple(sorted((a.id, a.input) for a in graph.artifacts)),
        tuple(sorted((p.id, p.name) for p in graph.processes)),
        tuple(sorted(graph.used)),
        tuple(sorted(graph.generated)),
        graph.result,
        graph.inputs,
    )


def _check_space(sem: Semantics, budget: int) -> list[Inputs]:
    size = sem.domain.size ** len(sem.program.inputs)
    if size > budget:
        raise BudgetExceeded(f"input space has {size} tuples, budget is {budget}")
    return sem.input_space()


class _Shape:
    """One label-stripped graph structure, shared by every u that emits it."""

    def __init__(self, graph: ProvGraph, sem: Semantics):
        self.graph = graph
        self.evaluator = Evaluator(graph, sem.interpretation)
        self.model: CausalModel = causal_model(graph, sem.interpretation)
        self.variables = program_variables(graph)
        self._cones: dict = {}

    def context(self, u_prime: Inputs) -> dict[str, Value]:
        names = self.graph.inputs
        return {exogenous_name(v): x for v, x in zip(names, u_prime)}

    def mechanism(self, v: str, scope: frozenset[str]):
        """Nearest ancestors of ``v`` in ``scope``, and the cone of nodes computing ``v`` from them."""
        key = (v, scope)
        if key not in self._cones:
            model = self.model
            frontier, cone, stack = set(), set(), [v]
            while stack:
                node = stack.pop()
                for p in model.parents(node):
                    if p in scope:
                        frontier.add(p)
                    elif p in model.equations and p not in cone:
                        cone.add(p)
                        stack.append(p)
            plan = tuple((x, model.equations[x].parents, model.equations[x].fn)
                         for x in model.order if x in cone or x == v)
            self._cones[key] = (frontier, plan)
        return self._cones[key]


class _Checker:
    def __init__(self, sem: Semantics, budget: int, tau_budget: int, strategy: str):
        if strategy not in STRATEGIES:
            raise ProvCauseError(f"unknown strategy {strategy!r}")
        self.sem = sem
        self.domain = sem.domain
        self.budget = budget
        self.tau_budget = tau_budget
        self.strategy = strategy
        self._shapes: dict[tuple, _Shape] = {}
        self._shape_of: dict[Inputs, _Shape] = {}
        self._runs: dict[Inputs, Run] = {}
        self._mechs: dict[Inputs, dict] = {}

    def shape(self, u: Inputs) -> _Shape:
        if u not in self._shape_of:
            graph = self.sem.graph(u)
            key = structure_key(graph)
            if key not in self._shapes:
                self._shapes[key] = _Shape(graph, self.sem)
            self._shape_of[u] = self._shapes[key]
        return self._shape_of[u]

    def run(self, u: Inputs) -> Run:
        if u not in self._runs:
            self._runs[u] = run(self.sem.program, self.domain, u)
        return self._runs[u]

    def reference_mechanisms(self, u: Inputs) -> dict:
        if u not in self._mechs:
            self._mechs[u] = self.sem.reference.mechanisms(u)
        return self._mechs[u]

    # functional

    def functional(self, u: Inputs, u_prime: Inputs) -> Counterexample | None:
        got = self.shape(u).evaluator(u_prime).result
        expected = self.run(u_prime).result
        if got != expected:
            return Counterexample(u, u_prime, (), self.sem.graph(u).result, expected, got)
        return None

    # causal

    def tau_space(self, variables: Sequence[str]) -> int:
        return (self.domain.size + 1) ** len(variables)

    def taus(self, variables: Sequence[str]) -> Iterator[tuple[tuple[str, Value], ...]]:
        for k in range(len(variables) + 1):
            for names in itertools.combinations(variables, k):
                for values in itertools.product(self.domain.values, repeat=k):
                    yield tuple(zip(names, values))

    def causal(self, u: Inputs, u_prime: Inputs, level: str,
               taus: Iterable | None = None) -> tuple[Counterexample | None, int, str]:
        """First failure for one pair, the number of skipped tau, and the route used."""
        shape = self.shape(u)
        if level == "pointwise":
            return self._literal(shape, u, u_prime, [()]), 0, "exhaustive"
        if taus is not None:
            return self._literal_counting(shape, u, u_prime, taus)
        strategy = self.strategy
        ref_vars = self.run(u_prime).variables
        if strategy == "auto":
            strategy = "exhaustive" if self.tau_space(shape.variables) <= self.tau_budget else "mechanism"
        if strategy == "mechanism" and not set(ref_vars) <= set(shape.variables):
            missing = [v for v in ref_vars if v not in shape.model.equations]
            if missing:
                return self._literal(shape, u, u_prime, [()]), self._skip_count(shape, ref_vars), "mechanism"
            strategy = "exhaustive"
        if strategy == "exhaustive":
            if self.tau_space(shape.variables) > self.tau_budget:
                raise BudgetExceeded(
                    f"{self.tau_space(shape.variables)} interventions per pair, budget is {self.tau_budget}")
            return self._literal_counting(shape, u, u_prime, self.taus(shape.variables))
        return self._mechanism(shape, u, u_prime), self._skip_count(shape, ref_vars), "mechanism"

    def _skip_count(self, shape: _Shape, ref_vars: Sequence[str]) -> int:
        kept = [v for v in shape.variables if v in set(ref_vars)]
        return self.tau_space(shape.variables) - self.tau_space(kept)

    def _literal_counting(self, shape, u, u_prime, taus):
        ref_vars = set(self.run(u_prime).variables)
        kept, skipped = [], 0
        for tau in taus:
            tau = tuple(tau)
            if all(k in ref_vars for k, _ in tau):
                kept.append(tau)
            else:
                skipped += 1
        return self._literal(shape, u, u_prime, kept), skipped, "exhaustive"

    def _literal(self, shape: _Shape, u, u_prime, taus) -> Counterexample | None:
        reference = self.sem.reference
        context = shape.context(u_prime)
        ref_vars = self.run(u_prime).variables
        for tau in taus:
            expected = reference(u_prime, dict(tau))
            got = shape.model.solve(context, dict(tau))
            for v in ref_vars:
                if got.get(v) != expected[v]:
                    return Counterexample(u, u_prime, tuple(tau), v, expected[v], got.get(v))
        return None

    def _mechanism(self, shape: _Shape, u, u_prime) -> Counterexample | None:
        ref_vars = self.run(u_prime).variables
        scope = frozenset(ref_vars)
        order = {v: i for i, v in enumerate(ref_vars)}
        context = shape.context(u_prime)
        mechanisms = self.reference_mechanisms(u_prime)
        values = self.domain.values
        for v in ref_vars:
            parents, f_v = mechanisms[v]
            frontier, plan = shape.mechanism(v, scope)
            union = sorted(set(parents) | frontier, key=order.__getitem__)
            for assignment in itertools.product(values, repeat=len(union)):
                a = dict(zip(union, assignment))
                expected = f_v(tuple(a[p] for p in parents))
                env = dict(context)
                env.update(a)
                for x, ps, fn in plan:
                    env[x] = fn(tuple(env[p] for p in ps))
                if env[v] != expected:
                    return Counterexample(u, u_prime, tuple(a.items()), v, expected, env[v])
        return None


def check_functional(sem: Semantics, level: str, budget: int = DEFAULT_BUDGET) -> Verdict:
    """pointwise: P(u) evaluated at u is f(u); global: P(u) evaluated at any u' is f(u')."""
    if level not in FUNCTIONAL_LEVELS:
        raise ProvCauseError(f"functional level must be one of {FUNCTIONAL_LEVELS}")
    space = _check_space(sem, budget)
    checker = _Checker(sem, budget, DEFAULT_TAU_BUDGET, "auto")
    checked = 0
    for u in space:
        for u_prime in ([u] if level == "pointwise" else space):
            checked += 1
            cx = checker.functional(u, u_prime)
            if cx is not None:
                return Verdict("functional", level, False, cx, checked)
    return Verdict("functional", level, True, None, checked)


def check_causal(sem: Semantics, level: str, strategy: str = "auto",
                 inputs: Iterable[Sequence[Value]] | None = None,
                 taus: Iterable[Mapping[str, Value]] | None = None,
                 budget: int = DEFAULT_BUDGET, tau_budget: int = DEFAULT_TAU_BUDGET) -> Verdict:
    """Causal approximation at ``level``; ``inputs`` / ``taus`` restrict the quantifiers.

    pointwise uses tau = {} and u' = u; local ranges over all tau with u' = u;
    global also ranges over every u'. A tau naming a variable that the
    u'-run does not assign is skipped and counted.
    """
    if level not in CAUSAL_LEVELS:
        raise ProvCauseError(f"causal level must be one of {CAUSAL_LEVELS}")
    space = _check_space(sem, budget)
    points = space if inputs is None else [tuple(u) for u in inputs]
    tau_list = None if taus is None else [tuple(t.items()) for t in taus]
    checker = _Checker(sem, budget, tau_budget, strategy)
    checked = skipped = 0
    used: set[str] = set()
    passed: set[tuple[int, Inputs]] = set()  # structure alone decides the model side
    for u in points:
        for u_prime in ([u] if level != "global" else space):
            checked += 1
            key = (id(checker.shape(u)), u_prime)
            if key in passed and tau_list is None and level != "pointwise":
                skipped += checker._skip_count(checker.shape(u), checker.run(u_prime).variables)
                continue
            cx, skip, route = checker.causal(u, u_prime, level, tau_list)
            skipped += skip
            passed.add(key)
            used.add(route)
            if cx is not None:
                return Verdict("causal", level, False, cx, checked, skipped, _route_name(used))
    return Verdict("causal", level, True, None, checked, skipped, _route_name(used))


def _route_name(used: set[str]) -> str:
    return "+".join(sorted(used)) if used else "none"


@dataclass(frozen=True)
class PowerRelation:
    """``u ~> u'``: the graph for u correctly models f at u'."""

    mode: str
    space: tuple[Inputs, ...]
    pairs: frozenset[tuple[Inputs, Inputs]]
    skipped: int = 0
    strategy: str | None = field(default=None, compare=False)

    @property
    def reflexive(self) -> bool:
        return all((u, u) in self.pairs for u in self.space)

    @property
    def total(self) -> bool:
        return len(self.pairs) == len(self.space) ** 2

    def sorted_pairs(self) -> list[tuple[Inputs, Inputs]]:
        return sorted(self.pairs)

    def to_json(self, domain: Domain, dump: bool = False) -> dict:
        out: dict = {
            "mode": self.mode,
            "pairs": len(self.pairs),
            "space": len(self.space),
            "reflexive": self.reflexive,
            "total": self.total,
        }
        if self.mode == "causal":
            out["skippedTau"] = self.skipped
        if dump:
            out["relation"] = [[[domain.render(x) for x in u], [domain.render(x) for x in v]]
                               for u, v in self.sorted_pairs()]
        return out


def power(sem: Semantics, mode: str, strategy: str = "mechanism",
          budget: int = DEFAULT_BUDGET, tau_budget: int = DEFAULT_TAU_BUDGET) -> PowerRelation:
    """The exact predictive-power relation, by exhaustion over all pairs."""
    if mode not in ("functional", "causal"):
        raise ProvCauseError("mode must be functional or causal")
    space = tuple(_check_space(sem, budget))
    checker = _Checker(sem, budget, tau_budget, strategy)
    pairs = set()
    skipped = 0
    used: set[str] = set()
    verdicts: dict[tuple[int, Inputs], bool] = {}
    for u in space:
        shape = id(checker.shape(u))
        for u_prime in space:
            key = (shape, u_prime)
            if key not in verdicts:
                if mode == "functional":
                    verdicts[key] = checker.functional(u, u_prime) is None
                else:
                    cx, skip, route = checker.causal(u, u_prime, "local")
                    verdicts[key] = cx is None
                    used.add(route)
            if mode == "causal":
                skipped += checker._skip_count(checker.shape(u), checker.run(u_prime).variables)
            if verdicts[key]:
                pairs.add((u, u_prime))
    return PowerRelation(mode, space, frozenset(pairs), skipped,
                         _route_name(used) if mode == "causal" else None)


def compare(a: PowerRelation, b: PowerRelation) -> str:
    """``"A<=B"``, ``"B<=A"``, ``"equal"`` or ``"incomparable"`` by set inclusion."""
    if set(a.space) != set(b.space):
        raise ProvCauseError("relations are over different input spaces")
    ab, ba = a.pairs <= b.pairs, b.pairs <= a.pairs
    if ab and ba:
        return "equal"
    if ab:
        return "A<=B"
    if ba:
        return "B<=A"
    return "incomparable"
