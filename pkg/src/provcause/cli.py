"""Command-line frontend: ``provcause <subcommand> ...``.

Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage, parse,
schema or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import approx, hpcause, opmrules, slp
from .causal import CausalModel, CausalSituation, intervene, model_to_json, read_model, valuation_to_json
from .domain import Domain
from .errors import ProvCauseError
from .generators import model_corpus, model_graph
from .provgraph import (ProvGraph, dumps, evaluate, graph_to_json, read_graph, read_interpretation,
                        validate)
from .translate import TranslationOptions, to_causal

USAGE_ERROR = 2


class UsageError(ProvCauseError):
    pass


# --- argument helpers -----------------------------------------------------------


def parse_pairs(text: str | None) -> dict[str, str]:
    """``k=v,k2=v2`` -> ``{"k": "v", "k2": "v2"}``, keeping order."""
    if not text:
        return {}
    out: dict[str, str] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        if key.strip() in out:
            raise UsageError(f"{key.strip()!r} given twice")
        out[key.strip()] = value.strip()
    return out


def resolve_names(given: dict[str, str], names: Sequence[str], what: str) -> dict[str, str]:
    """Match user keys to ``names`` exactly, or case-insensitively when unambiguous."""
    out: dict[str, str] = {}
    for key, value in given.items():
        if key in names:
            out[key] = value
            continue
        matches = [n for n in names if n.lower() == key.lower()]
        if len(matches) != 1:
            raise UsageError(f"unknown {what} {key!r}; expected one of {list(names)}")
        out[matches[0]] = value
    return out


def read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(args) -> ProvGraph:
    return read_graph(read_bytes(args.graph))


def load_interp(args, graph: ProvGraph):
    if not args.interp:
        raise UsageError("--interp is required for this command")
    return read_interpretation(read_bytes(args.interp), graph.domain)


def translation_options(args) -> TranslationOptions:
    return TranslationOptions(fault_terms=getattr(args, "faults", "off") == "on")


def load_situation(args) -> CausalSituation:
    """A situation from a model file plus a context, or from a labeled graph."""
    data = read_bytes(args.file)
    try:
        kind = "model" if "endogenous" in json.loads(data) else "graph"
    except (ValueError, TypeError):
        kind = "graph"  # let the graph reader report the position
    if kind == "graph":
        graph = read_graph(data)
        translation = to_causal(graph, load_interp(args, graph), translation_options(args))
        if not translation.consistent:
            raise UsageError(f"labels are inconsistent at {list(translation.inconsistent_nodes)}")
        return translation.situation
    model = read_model(data)
    return CausalSituation(model, model.solve(model_context(args, model)))


def model_context(args, model: CausalModel) -> dict:
    domain = model.domain
    if args.inputs:
        given = resolve_names(parse_pairs(args.inputs), model.exogenous, "exogenous variable")
        missing = [u for u in model.exogenous if u not in given]
        if missing:
            raise UsageError(f"--inputs does not assign {missing}")
        return {u: domain.parse(given[u]) for u in model.exogenous}
    path = Path(args.valuation) if args.valuation else Path(args.file).with_suffix(".valuation.json")
    if not path.exists():
        raise UsageError("a model needs a context: pass --inputs, --valuation, "
                         f"or provide {path.name}")
    obj = json.loads(read_bytes(str(path)))
    values = obj.get("values", obj) if isinstance(obj, dict) else None
    if not isinstance(values, dict):
        raise UsageError(f"{path}: expected an object of values")
    missing = [u for u in model.exogenous if u not in values]
    if missing:
        raise UsageError(f"{path} does not assign {missing}")
    return {u: domain.parse(str(values[u])) for u in model.exogenous}


def literals(text: str | None, situation: CausalSituation, flag: str) -> tuple:
    pairs = parse_pairs(text)
    if not pairs:
        raise UsageError(f"{flag} is required")
    model = situation.model
    names = tuple(model.equations)
    resolved = resolve_names(pairs, names, "variable")
    return tuple((x, model.domain.parse(v)) for x, v in resolved.items())


def load_program(args) -> tuple[slp.Program, Domain]:
    text = read_bytes(args.program).decode("utf-8")
    return slp.parse(text), Domain.from_text(args.domain)


def program_inputs(args, program: slp.Program, domain: Domain) -> tuple:
    given = resolve_names(parse_pairs(args.inputs), program.inputs, "input")
    missing = [v for v in program.inputs if v not in given]
    if missing:
        raise UsageError(f"--inputs does not assign {missing}")
    return tuple(domain.parse(given[v]) for v in program.inputs)


# --- subcommands ----------------------------------------------------------------

Output = Callable[[str], None]


def cmd_validate(args, out: Output) -> int:
    graph = load_graph(args)
    interp = read_interpretation(read_bytes(args.interp), graph.domain) if args.interp else None
    problems = validate(graph, interp)
    out(dumps({"valid": not problems, "violations": [v.to_json() for v in problems]}))
    return 0 if not problems else 1


def cmd_eval(args, out: Output) -> int:
    graph = load_graph(args)
    interp = load_interp(args, graph)
    given = resolve_names(parse_pairs(args.inputs), graph.inputs, "input")
    values = []
    for v in graph.inputs:
        if v in given:
            values.append(graph.domain.parse(given[v]))
        elif graph.artifact(v).value is not None:
            values.append(graph.artifact(v).value)
        else:
            raise UsageError(f"no value for input {v!r}")
    evaluation = evaluate(graph, interp, values)
    if args.format == "json":
        out(dumps(valuation_to_json(graph.domain, {a: evaluation.values[a] for a in sorted(graph.artifact_ids)})))
    else:
        out(f"{graph.result}={graph.domain.render(evaluation.result)}\n")
    return 0


def cmd_to_causal(args, out: Output) -> int:
    graph = load_graph(args)
    translation = to_causal(graph, load_interp(args, graph), translation_options(args))
    out(dumps(model_to_json(translation.model)))
    if args.valuation:
        sidecar = {
            "values": valuation_to_json(graph.domain, dict(sorted(translation.valuation.items()))),
            "consistent": translation.consistent,
        }
        Path(args.valuation).write_text(dumps(sidecar), encoding="utf-8")
    return 0


def cmd_intervene(args, out: Output) -> int:
    situation = load_situation(args)
    settings = dict(literals(args.set, situation, "--set"))
    model = intervene(situation.model, settings)
    values = model.solve(situation.context)
    out(dumps({"set": valuation_to_json(model.domain, settings),
               "values": valuation_to_json(model.domain, values)}))
    return 0


def cmd_cause(args, out: Output) -> int:
    situation = load_situation(args)
    candidate = literals(args.candidate, situation, "--candidate")
    effect = literals(args.effect, situation, "--effect")
    if len(effect) != 1:
        raise UsageError("--effect takes exactly one Y=v")
    verdict = hpcause.is_actual_cause(hpcause.CauseQuery(situation, candidate, effect[0]))
    out(dumps(verdict.to_json(situation.model.domain)))
    return 0 if verdict.actual else 1


def cmd_causes(args, out: Output) -> int:
    situation = load_situation(args)
    effect = literals(args.effect, situation, "--effect")
    if len(effect) != 1:
        raise UsageError("--effect takes exactly one Y=v")
    domain = situation.model.domain
    causes = hpcause.enumerate_actual_causes(situation, effect[0], args.max_cause_size)
    if args.format == "tsv":
        out("".join(",".join(f"{x}={domain.render(v)}" for x, v in c.candidate) + "\n" for c in causes))
    else:
        out(dumps({
            "effect": {effect[0][0]: domain.render(effect[0][1])},
            "maxCauseSize": args.max_cause_size,
            "causes": [c.to_json(domain) for c in causes],
        }))
    return 0


def cmd_infer(args, out: Output) -> int:
    edges = opmrules.infer(load_graph(args))
    if args.format == "json":
        out(dumps([{"relation": r, "from": a, "to": b} for r, a, b in edges.triples()]))
    else:
        out(edges.to_tsv())
    return 0


def cmd_audit(args, out: Output) -> int:
    graph = load_graph(args)
    report = opmrules.audit(graph, load_interp(args, graph), translation_options(args), args.max_cause_size)
    out(dumps([row.to_json(graph.domain) for row in report.rows]))
    out(report.summary() + "\n")
    return 1 if args.strict and report.spurious else 0


def cmd_conjecture(args, out: Output) -> int:
    if args.random is not None:
        reports = []
        for i, situation in enumerate(model_corpus(args.seed, args.random)):
            graph, interp = model_graph(situation)
            report = opmrules.check_conjecture(graph, interp, args.max_cause_size)
            reports.append({"index": i, **report.to_json()})
        out(dumps({"seed": args.seed, "graphs": reports}))
        return 0
    if not args.graph:
        raise UsageError("conjecture needs a graph file or --random N")
    graph = load_graph(args)
    report = opmrules.check_conjecture(graph, load_interp(args, graph), args.max_cause_size,
                                       translation_options(args))
    out(dumps(report.to_json()))
    return 0


def cmd_trace(args, out: Output) -> int:
    program, domain = load_program(args)
    inputs = program_inputs(args, program, domain)
    if args.semantics:
        out(dumps(graph_to_json(slp.emit(program, args.semantics, inputs, domain))))
        return 0
    r = slp.run(program, domain, inputs)
    if args.format == "tsv":
        out("".join(f"{s.var}\t{s.op}\t{domain.render(s.value)}\n" for s in r.steps))
        return 0
    out(dumps({
        "result": domain.render(r.result),
        "resultVariable": r.result_var,
        "steps": [{"var": s.var, "op": s.op,
                   "args": [a if kind == "var" else domain.render(a) for kind, a in s.args],
                   "value": domain.render(s.value)} for s in r.steps],
    }))
    return 0


def _semantics(args, program, domain, kind=None) -> slp.Semantics:
    return slp.Semantics(kind or args.semantics, program, domain)


def cmd_approx(args, out: Output) -> int:
    program, domain = load_program(args)
    sem = _semantics(args, program, domain)
    if args.mode == "functional":
        verdict = approx.check_functional(sem, args.level, args.budget)
    else:
        inputs = [program_inputs(args, program, domain)] if args.inputs else None
        taus = None
        if args.set:
            taus = [{k: domain.parse(v) for k, v in parse_pairs(args.set).items()}]
        verdict = approx.check_causal(sem, args.level, args.strategy, inputs, taus,
                                      args.budget, args.tau_budget)
    out(dumps(verdict.to_json(domain, program.inputs)))
    return 0 if verdict.passed else 1


def cmd_power(args, out: Output) -> int:
    program, domain = load_program(args)
    relation = approx.power(_semantics(args, program, domain), args.mode, budget=args.budget,
                            tau_budget=args.tau_budget)
    out(dumps(relation.to_json(domain, dump=args.dump)))
    return 0


def cmd_compare(args, out: Output) -> int:
    program, domain = load_program(args)
    kinds = [k.strip() for k in args.semantics.split(",")]
    if len(kinds) != 2:
        raise UsageError("compare needs --semantics A,B")
    a, b = (approx.power(_semantics(args, program, domain, k), args.mode, budget=args.budget,
                         tau_budget=args.tau_budget) for k in kinds)
    out(dumps({"A": kinds[0], "B": kinds[1], "mode": args.mode, "ordering": approx.compare(a, b)}))
    return 0


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="provcause", description="Provenance graphs as causal models.")
    parser.add_argument("--output", help="write output to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(handler=fn)
        return p

    def graph_args(p, interp_required=False):
        p.add_argument("graph", help="graph file (JSON)")
        p.add_argument("--interp", required=interp_required, help="interpretation file (JSON)")

    def situation_args(p):
        p.add_argument("file", help="model file, or graph file with --interp")
        p.add_argument("--interp", help="interpretation file, when FILE is a graph")
        p.add_argument("--inputs", help="exogenous context U=v,... for a model file")
        p.add_argument("--valuation", help="context file ({\"values\": {...}}) for a model file")
        p.add_argument("--faults", choices=("on", "off"), default="off")

    def program_args(p):
        p.add_argument("program", help="program file (.slp)")
        p.add_argument("--domain", default="bool", help="bool, mod:M (default bool)")

    def budget_args(p):
        p.add_argument("--budget", type=int, default=approx.DEFAULT_BUDGET, help="max input tuples")
        p.add_argument("--tau-budget", type=int, default=approx.DEFAULT_TAU_BUDGET,
                       help="max interventions per input pair for the exhaustive route")

    max_size = {"type": int, "default": hpcause.DEFAULT_MAX_CAUSE_SIZE, "dest": "max_cause_size"}

    p = add("validate", cmd_validate, "check a graph's well-formedness")
    graph_args(p)

    p = add("eval", cmd_eval, "evaluate a graph at given inputs")
    graph_args(p, True)
    p.add_argument("--inputs", help="input values k=v,... (defaults to input labels)")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = add("to-causal", cmd_to_causal, "translate a labeled graph to a causal model")
    graph_args(p, True)
    p.add_argument("--faults", choices=("on", "off"), default="off")
    p.add_argument("--valuation", help="write the sidecar valuation here")

    p = add("intervene", cmd_intervene, "solve a model under an intervention")
    situation_args(p)
    p.add_argument("--set", required=True, help="interventions X=v,...")

    p = add("cause", cmd_cause, "decide whether X=x is an actual cause of Y=y")
    situation_args(p)
    p.add_argument("--candidate", required=True, help="candidate cause X=v,...")
    p.add_argument("--effect", required=True, help="effect Y=v")

    p = add("causes", cmd_causes, "enumerate actual causes of Y=y")
    situation_args(p)
    p.add_argument("--effect", required=True, help="effect Y=v")
    p.add_argument("--max-cause-size", **max_size)
    p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = add("infer", cmd_infer, "apply the OPM inference rules")
    p.add_argument("graph", help="graph file (JSON)")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    p = add("audit", cmd_audit, "classify derived edges as sound or spurious")
    graph_args(p, True)
    p.add_argument("--faults", choices=("on", "off"), default="off")
    p.add_argument("--max-cause-size", **max_size)
    p.add_argument("--strict", action="store_true", help="exit 1 when any edge is spurious")

    p = add("conjecture", cmd_conjecture, "compare wasDerivedFrom+ with part-of-cause")
    p.add_argument("graph", nargs="?", help="graph file (JSON)")
    p.add_argument("--interp")
    p.add_argument("--faults", choices=("on", "off"), default="off")
    p.add_argument("--max-cause-size", **max_size)
    p.add_argument("--random", type=int, metavar="N", help="check N seeded random models instead")
    p.add_argument("--seed", type=int, default=0)

    p = add("trace", cmd_trace, "run a program and print its trace or emitted graph")
    program_args(p)
    p.add_argument("--inputs", required=True, help="input values k=v,...")
    p.add_argument("--semantics", choices=slp.SEMANTICS_KINDS, help="emit this semantics' graph")
    p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = add("approx", cmd_approx, "check pointwise/local/global approximation")
    program_args(p)
    p.add_argument("--semantics", choices=slp.SEMANTICS_KINDS, required=True)
    p.add_argument("--level", choices=approx.CAUSAL_LEVELS, required=True)
    p.add_argument("--mode", choices=("causal", "functional"), default="causal")
    p.add_argument("--strategy", choices=approx.STRATEGIES, default="auto")
    p.add_argument("--inputs", help="restrict to this input tuple k=v,...")
    p.add_argument("--set", help="restrict to this single intervention X=v,...")
    budget_args(p)

    p = add("power", cmd_power, "compute the predictive-power relation")
    program_args(p)
    p.add_argument("--semantics", choices=slp.SEMANTICS_KINDS, required=True)
    p.add_argument("--mode", choices=("causal", "functional"), default="causal")
    p.add_argument("--dump", action="store_true", help="include the sorted pairs")
    budget_args(p)

    p = add("compare", cmd_compare, "compare the predictive power of two semantics")
    program_args(p)
    p.add_argument("--semantics", required=True, help="two semantics A,B")
    p.add_argument("--mode", choices=("causal", "functional"), default="causal")
    budget_args(p)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    chunks: list[str] = []
    try:
        code = args.handler(args, chunks.append)
    except ProvCauseError as exc:
        sys.stdout.write("".join(chunks))
        print(f"provcause {args.command}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    text = "".join(chunks)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
