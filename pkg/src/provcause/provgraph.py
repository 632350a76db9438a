"""Provenance graphs: data model, structural validation, evaluation, JSON I/O.

A provenance graph is a bipartite DAG of artifacts (data) and processes
(computation steps). ``used`` edges run from a process to the artifacts it
read, each tagged with a 1-based port; ``generated`` edges run from an artifact
to the process that produced it.
"""

from __future__ import annotations

import graphlib
import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

from .domain import Domain, Value
from .errors import EvaluationError, FunctionSpecError, ParseError, SchemaError
from .functions import make_function


@dataclass(frozen=True)
class Artifact:
    id: str
    value: Value | None = None
    input: bool = False


@dataclass(frozen=True)
class Process:
    id: str
    name: str


@dataclass(frozen=True)
class ProvGraph:
    domain: Domain
    artifacts: tuple[Artifact, ...]
    processes: tuple[Process, ...]
    used: tuple[tuple[str, str, int], ...]  # (process, artifact, port)
    generated: tuple[tuple[str, str], ...]  # (artifact, process)
    result: str
    inputs: tuple[str, ...]

    def artifact(self, node_id: str) -> Artifact:
        for a in self.artifacts:
            if a.id == node_id:
                return a
        raise KeyError(node_id)

    @property
    def artifact_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.artifacts)

    @property
    def process_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.processes)

    def uses_of(self, process_id: str) -> list[str]:
        """Artifacts read by a process, in port order."""
        return [a for p, a, _ in sorted(self.used, key=lambda e: e[2]) if p == process_id]

    def generator_of(self, artifact_id: str) -> str | None:
        for a, p in self.generated:
            if a == artifact_id:
                return p
        return None

    def output_of(self, process_id: str) -> str | None:
        for a, p in self.generated:
            if p == process_id:
                return a
        return None

    def labels(self) -> dict[str, Value | None]:
        return {a.id: a.value for a in self.artifacts}

    def with_labels(self, labels: Mapping[str, Value]) -> ProvGraph:
        return replace(
            self,
            artifacts=tuple(replace(a, value=labels.get(a.id, a.value)) for a in self.artifacts),
        )

    def edges(self) -> list[tuple[str, str]]:
        """Directed edges in the provenance direction (effect -> cause)."""
        return [(p, a) for p, a, _ in self.used] + [(a, p) for a, p in self.generated]


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    fn: Any


@dataclass(frozen=True)
class Interpretation:
    """Maps each process name to its arity and a total function on the domain."""

    domain: Domain
    ops: Mapping[str, Operation]

    @classmethod
    def from_specs(cls, domain: Domain, specs: Iterable[tuple[str, int, dict]]) -> Interpretation:
        ops: dict[str, Operation] = {}
        for name, arity, spec in specs:
            if name in ops:
                raise SchemaError(f"operation {name!r} declared twice")
            ops[name] = Operation(name, arity, make_function(spec, arity, domain))
        return cls(domain, ops)

    def arity(self, name: str) -> int:
        return self.ops[name].arity

    def __contains__(self, name: str) -> bool:
        return name in self.ops

    def __getitem__(self, name: str) -> Any:
        return self.ops[name].fn


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple[str, ...]
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "ids": list(self.ids), "message": self.message}


def validate(graph: ProvGraph, interp: Interpretation | None = None) -> list[Violation]:
    """Every violated structural invariant; an empty list means the graph is valid.

    Without an interpretation the sortedness check (arity per process name)
    is skipped.
    """
    out: list[Violation] = []

    def report(kind: str, ids: Sequence[str], message: str) -> None:
        out.append(Violation(kind, tuple(ids), message))

    artifacts = {a.id: a for a in graph.artifacts}
    processes = {p.id: p for p in graph.processes}
    seen: set[str] = set()
    for node_id in [a.id for a in graph.artifacts] + [p.id for p in graph.processes]:
        if node_id in seen:
            report("duplicate-id", [node_id], f"node id {node_id!r} is declared more than once")
        seen.add(node_id)

    def kind_of(node_id: str) -> str | None:
        if node_id in artifacts:
            return "artifact"
        if node_id in processes:
            return "process"
        return None

    good_used: list[tuple[str, str, int]] = []
    for p, a, port in graph.used:
        kp, ka = kind_of(p), kind_of(a)
        if kp is None or ka is None:
            missing = [x for x, k in ((p, kp), (a, ka)) if k is None]
            report("dangling-edge", [p, a], f"used edge ({p}, {a}) refers to unknown node(s) {missing}")
        elif kp == ka:
            report("bipartite", [p, a], f"used edge joins two {kp} nodes {p!r} and {a!r}")
        elif kp != "process":
            report("edge-direction", [p, a], f"used edge must run process -> artifact, got {p!r} -> {a!r}")
        else:
            good_used.append((p, a, port))
        if not isinstance(port, int) or port < 1:
            report("port", [p, a], f"used edge ({p}, {a}) has invalid port {port!r}")

    good_generated: list[tuple[str, str]] = []
    for a, p in graph.generated:
        ka, kp = kind_of(a), kind_of(p)
        if ka is None or kp is None:
            missing = [x for x, k in ((a, ka), (p, kp)) if k is None]
            report("dangling-edge", [a, p], f"generated edge ({a}, {p}) refers to unknown node(s) {missing}")
        elif ka == kp:
            report("bipartite", [a, p], f"generated edge joins two {ka} nodes {a!r} and {p!r}")
        elif ka != "artifact":
            report("edge-direction", [a, p], f"generated edge must run artifact -> process, got {a!r} -> {p!r}")
        else:
            good_generated.append((a, p))

    outputs: dict[str, list[str]] = {p: [] for p in processes}
    generators: dict[str, list[str]] = {a: [] for a in artifacts}
    for a, p in good_generated:
        outputs[p].append(a)
        generators[a].append(p)
    for p in processes:
        if len(outputs[p]) != 1:
            report("functional", [p, *outputs[p]],
                   f"process {p!r} generates {len(outputs[p])} artifacts, expected exactly one")
    for a, art in artifacts.items():
        gens = generators[a]
        if art.input and gens:
            report("input-generated", [a, *gens], f"input artifact {a!r} has a generating process")
        elif not art.input and len(gens) != 1:
            report("generation", [a, *gens],
                   f"non-input artifact {a!r} has {len(gens)} generating processes, expected exactly one")

    if interp is not None:
        if interp.domain != graph.domain:
            report("domain", [], f"graph domain {graph.domain.describe()} differs from "
                                 f"interpretation domain {interp.domain.describe()}")
        ports: dict[str, list[int]] = {p: [] for p in processes}
        for p, _, port in good_used:
            ports[p].append(port)
        for p, proc in processes.items():
            if proc.name not in interp:
                report("unknown-operation", [p], f"process {p!r} has name {proc.name!r} with no interpretation")
                continue
            ar = interp.arity(proc.name)
            if sorted(ports[p]) != list(range(1, ar + 1)):
                report("sorted", [p], f"process {p!r} ({proc.name}, ar={ar}) has ports "
                                      f"{sorted(ports[p])}, expected 1..{ar}")

    sorter = graphlib.TopologicalSorter()
    for node_id in seen:
        sorter.add(node_id)
    for p, a, _ in good_used:
        sorter.add(p, a)
    for a, p in good_generated:
        sorter.add(a, p)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        report("cycle", list(dict.fromkeys(cycle)), f"graph has a cycle through {' -> '.join(cycle)}")

    for a in graph.artifacts:
        if a.value is not None and a.value not in graph.domain:
            report("label", [a.id], f"artifact {a.id!r} label {a.value!r} is not in {graph.domain.describe()}")

    if graph.result not in artifacts:
        report("result", [graph.result], f"result node {graph.result!r} is not an artifact")
    declared = set()
    for v in graph.inputs:
        if v in declared:
            report("inputs", [v], f"input {v!r} listed twice")
        declared.add(v)
        if v not in artifacts or not artifacts[v].input:
            report("inputs", [v], f"declared input {v!r} is not an input artifact")
    for a in graph.artifacts:
        if a.input and a.id not in declared:
            report("inputs", [a.id], f"input artifact {a.id!r} missing from the ordered input list")
    return out


@dataclass(frozen=True)
class Evaluation:
    values: dict[str, Value]
    result: Value


@dataclass(frozen=True)
class Evaluator:
    """A validated graph compiled into a fixed evaluation plan."""

    graph: ProvGraph
    interp: Interpretation
    _plan: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        problems = validate(self.graph, self.interp)
        if problems:
            raise EvaluationError("invalid graph: " + "; ".join(v.message for v in problems))
        object.__setattr__(self, "_plan", self._compile(topological_order(self.graph)))

    def _compile(self, order: Sequence[str]) -> tuple:
        names = {p.id: p.name for p in self.graph.processes}
        plan = []
        for node in order:
            if node in names:
                plan.append((node, tuple(self.graph.uses_of(node)), self.interp[names[node]]))
            elif node not in self.graph.inputs:
                plan.append((node, (self.graph.generator_of(node),), None))
        return tuple(plan)

    def __call__(self, inputs: Sequence[Value], order: Sequence[str] | None = None) -> Evaluation:
        graph = self.graph
        if len(inputs) != len(graph.inputs):
            raise EvaluationError(f"expected {len(graph.inputs)} inputs, got {len(inputs)}")
        for v in inputs:
            if v not in graph.domain:
                raise EvaluationError(f"input value {v!r} is not in {graph.domain.describe()}")
        plan = self._plan
        if order is not None:
            _check_order(graph, order)
            plan = self._compile(order)
        values: dict[str, Value] = dict(zip(graph.inputs, inputs))
        for node, args, fn in plan:
            if fn is None:
                values[node] = values[args[0]]
            else:
                values[node] = fn(tuple(values[a] for a in args))
        return Evaluation(values, values[graph.result])


def topological_order(graph: ProvGraph) -> list[str]:
    """Cause-before-effect order of all nodes (inputs first)."""
    sorter = graphlib.TopologicalSorter()
    for node in graph.artifact_ids + graph.process_ids:
        sorter.add(node)
    for p, a, _ in graph.used:
        sorter.add(p, a)
    for a, p in graph.generated:
        sorter.add(a, p)
    return list(sorter.static_order())


def _check_order(graph: ProvGraph, order: Sequence[str]) -> None:
    nodes = set(graph.artifact_ids + graph.process_ids)
    if set(order) != nodes or len(order) != len(nodes):
        raise EvaluationError("evaluation order must list every node exactly once")
    position = {n: i for i, n in enumerate(order)}
    for effect, cause in graph.edges():
        if position[cause] > position[effect]:
            raise EvaluationError(f"order places {effect!r} before its cause {cause!r}")


def evaluate(graph: ProvGraph, interp: Interpretation, inputs: Sequence[Value],
             order: Sequence[str] | None = None) -> Evaluation:
    """Value of every node when the graph is run on ``inputs`` (ordered as ``graph.inputs``)."""
    return Evaluator(graph, interp)(tuple(inputs), order)


def label(graph: ProvGraph, interp: Interpretation, inputs: Sequence[Value]) -> ProvGraph:
    """The graph with every artifact labeled by evaluation at ``inputs``."""
    values = evaluate(graph, interp, inputs).values
    return graph.with_labels({a: values[a] for a in graph.artifact_ids})


def input_labels(graph: ProvGraph) -> tuple:
    return tuple(graph.artifact(v).value for v in graph.inputs)


@dataclass(frozen=True)
class GraphFunction:
    """The function D^n -> D computed by a graph."""

    evaluator: Evaluator

    @property
    def arity(self) -> int:
        return len(self.evaluator.graph.inputs)

    @property
    def domain(self) -> Domain:
        return self.evaluator.graph.domain

    def __call__(self, inputs: Sequence[Value]) -> Value:
        return self.evaluator(tuple(inputs)).result

    def table(self) -> dict[tuple, Value]:
        return {u: self(u) for u in itertools.product(self.domain.values, repeat=self.arity)}


def functional_semantics(graph: ProvGraph, interp: Interpretation) -> GraphFunction:
    return GraphFunction(Evaluator(graph, interp))


# --- JSON I/O -----------------------------------------------------------------

_GRAPH_KEYS = {"domain", "artifacts", "processes", "result", "inputs"}


def _load_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _expect_keys(obj: Any, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise SchemaError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"missing field(s) {sorted(missing)} in {where}")


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"{where} must be a string")
    return value


def read_graph(data: bytes | str) -> ProvGraph:
    """Parse a graph file; raises ParseError (with position) or SchemaError."""
    obj = _load_json(data)
    if not isinstance(obj, dict):
        raise SchemaError("graph file must be a JSON object")
    unknown = set(obj) - _GRAPH_KEYS
    if unknown:
        raise SchemaError(f"unknown field(s) {sorted(unknown)} in graph")
    if not obj.get("artifacts") or "result" not in obj:
        raise SchemaError("no result node")
    _expect_keys(obj, _GRAPH_KEYS, set(), "graph")
    domain = Domain.from_json(obj["domain"])
    if not isinstance(obj["artifacts"], list) or not isinstance(obj["processes"], list):
        raise SchemaError("'artifacts' and 'processes' must be lists")
    artifacts = []
    for i, a in enumerate(obj["artifacts"]):
        _expect_keys(a, {"id"}, {"value", "input"}, f"artifacts[{i}]")
        value = a.get("value")
        if value is not None:
            value = domain.parse(_string(value, f"artifacts[{i}].value"))
        flag = a.get("input", False)
        if not isinstance(flag, bool):
            raise SchemaError(f"artifacts[{i}].input must be a boolean")
        artifacts.append(Artifact(_string(a["id"], f"artifacts[{i}].id"), value, flag))
    processes, used, generated = [], [], []
    for i, p in enumerate(obj["processes"]):
        _expect_keys(p, {"id", "name", "uses", "generates"}, set(), f"processes[{i}]")
        pid = _string(p["id"], f"processes[{i}].id")
        processes.append(Process(pid, _string(p["name"], f"processes[{i}].name")))
        if not isinstance(p["uses"], list):
            raise SchemaError(f"processes[{i}].uses must be a list")
        for j, u in enumerate(p["uses"]):
            _expect_keys(u, {"artifact", "port"}, set(), f"processes[{i}].uses[{j}]")
            if not isinstance(u["port"], int) or isinstance(u["port"], bool):
                raise SchemaError(f"processes[{i}].uses[{j}].port must be an integer")
            used.append((pid, _string(u["artifact"], f"processes[{i}].uses[{j}].artifact"), u["port"]))
        generated.append((_string(p["generates"], f"processes[{i}].generates"), pid))
    result = _string(obj["result"], "result")
    if result not in {a.id for a in artifacts}:
        raise SchemaError(f"no result node: {result!r} is not an artifact")
    if not isinstance(obj["inputs"], list):
        raise SchemaError("'inputs' must be a list")
    inputs = tuple(_string(v, "inputs[]") for v in obj["inputs"])
    return ProvGraph(domain, tuple(artifacts), tuple(processes), tuple(used), tuple(generated), result, inputs)


def graph_to_json(graph: ProvGraph) -> dict:
    artifacts = []
    for a in sorted(graph.artifacts, key=lambda a: a.id):
        entry: dict[str, Any] = {"id": a.id}
        if a.value is not None:
            entry["value"] = graph.domain.render(a.value)
        entry["input"] = a.input
        artifacts.append(entry)
    processes = []
    for p in sorted(graph.processes, key=lambda p: p.id):
        uses = sorted(((port, a) for q, a, port in graph.used if q == p.id))
        generates = [a for a, q in graph.generated if q == p.id]
        if len(generates) != 1:
            raise SchemaError(f"process {p.id!r} must generate exactly one artifact to be written")
        processes.append({
            "id": p.id,
            "name": p.name,
            "uses": [{"artifact": a, "port": port} for port, a in uses],
            "generates": generates[0],
        })
    return {
        "domain": graph.domain.to_json(),
        "artifacts": artifacts,
        "processes": processes,
        "result": graph.result,
        "inputs": list(graph.inputs),
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_graph(graph: ProvGraph) -> bytes:
    """Canonical serialization: nodes sorted by id, uses sorted by port."""
    return dumps(graph_to_json(graph)).encode("utf-8")


def read_interpretation(data: bytes | str, domain: Domain) -> Interpretation:
    obj = _load_json(data)
    _expect_keys(obj, {"ops"}, set(), "interpretation")
    if not isinstance(obj["ops"], list):
        raise SchemaError("'ops' must be a list")
    specs = []
    for i, op in enumerate(obj["ops"]):
        _expect_keys(op, {"name", "arity", "fn"}, set(), f"ops[{i}]")
        arity = op["arity"]
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
            raise SchemaError(f"ops[{i}].arity must be a non-negative integer")
        specs.append((_string(op["name"], f"ops[{i}].name"), arity, op["fn"]))
    try:
        return Interpretation.from_specs(domain, specs)
    except FunctionSpecError as exc:
        raise SchemaError(str(exc)) from None


def write_interpretation(interp: Interpretation) -> bytes:
    ops = [
        {"name": op.name, "arity": op.arity, "fn": op.fn.to_spec()}
        for op in sorted(interp.ops.values(), key=lambda o: o.name)
    ]
    return dumps({"ops": ops}).encode("utf-8")
