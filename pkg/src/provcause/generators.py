"""Seeded random boolean causal models and labeled provenance graphs.

Both generators are deterministic functions of the seed, so a corpus is
named by ``(seed, count)``.
"""

from __future__ import annotations

import itertools
import random

from .causal import CausalModel, CausalSituation, Equation
from .domain import Domain
from .functions import Table
from .provgraph import Artifact, Interpretation, Operation, ProvGraph, Process, label

BOOL = Domain.boolean()


def random_table(rng: random.Random, arity: int, domain: Domain = BOOL) -> Table:
    rows = tuple((args, rng.choice(domain.values))
                 for args in itertools.product(domain.values, repeat=arity))
    return Table(arity, rows)


def random_model(rng: random.Random, max_endogenous: int = 5, max_exogenous: int = 3,
                 max_parents: int = 3) -> CausalModel:
    """An acyclic boolean model; variables ``V0..Vk-1`` are in topological order."""
    exogenous = tuple(f"U{i}" for i in range(rng.randint(1, max_exogenous)))
    equations: dict[str, Equation] = {}
    names: list[str] = []
    for i in range(rng.randint(1, max_endogenous)):
        pool = list(names)
        parents = rng.sample(pool, rng.randint(0, min(max_parents, len(pool))))
        if not parents or rng.random() < 0.5:
            parents.append(rng.choice(exogenous))
        parents = tuple(sorted(parents))
        name = f"V{i}"
        equations[name] = Equation(parents, random_table(rng, len(parents)))
        names.append(name)
    return CausalModel(BOOL, exogenous, equations)


def random_situation(rng: random.Random, **kwargs) -> CausalSituation:
    model = random_model(rng, **kwargs)
    context = {u: rng.choice(BOOL.values) for u in model.exogenous}
    return CausalSituation(model, model.solve(context))


def model_corpus(seed: int, count: int, **kwargs) -> list[CausalSituation]:
    rng = random.Random(seed)
    return [random_situation(rng, **kwargs) for _ in range(count)]


def random_graph(rng: random.Random, max_inputs: int = 6, max_nodes: int = 30,
                 max_arity: int = 3) -> tuple[ProvGraph, Interpretation]:
    """A valid functional, sorted boolean graph labeled at random inputs.

    Every process gets its own operation ``op<i>`` with a random table, and
    the result is the artifact generated last.
    """
    n_inputs = rng.randint(1, max_inputs)
    inputs = tuple(f"a{i}" for i in range(n_inputs))
    max_procs = max(1, (max_nodes - n_inputs) // 2)
    artifacts = [Artifact(a, None, True) for a in inputs]
    processes, used, generated, ops = [], [], [], {}
    available = list(inputs)
    for i in range(rng.randint(1, max_procs)):
        arity = rng.randint(1, min(max_arity, len(available)))
        args = rng.sample(available, arity)
        pid, out, op = f"p{i}", f"b{i}", f"op{i}"
        ops[op] = Operation(op, arity, random_table(rng, arity))
        processes.append(Process(pid, op))
        used.extend((pid, a, port) for port, a in enumerate(args, 1))
        generated.append((out, pid))
        artifacts.append(Artifact(out, None, False))
        available.append(out)
    graph = ProvGraph(BOOL, tuple(artifacts), tuple(processes), tuple(used), tuple(generated),
                      available[-1], inputs)
    interp = Interpretation(BOOL, ops)
    values = tuple(rng.choice(BOOL.values) for _ in inputs)
    return label(graph, interp, values), interp


def graph_corpus(seed: int, count: int, **kwargs) -> list[tuple[ProvGraph, Interpretation]]:
    rng = random.Random(seed)
    return [random_graph(rng, **kwargs) for _ in range(count)]


def model_graph(situation: CausalSituation) -> tuple[ProvGraph, Interpretation]:
    """The provenance graph of a model, labeled by the situation.

    Exogenous variables become input artifacts and each endogenous ``V``
    becomes a process ``p_V`` (operation ``f_V``) generating artifact ``V``.
    """
    model, sigma = situation.model, situation.valuation
    inputs = tuple(model.exogenous)
    artifacts = [Artifact(u, sigma[u], True) for u in inputs]
    processes, used, generated, ops = [], [], [], {}
    for v in model.order:
        eq = model.equations[v]
        pid, op = f"p_{v}", f"f_{v}"
        ops[op] = Operation(op, len(eq.parents), eq.fn)
        processes.append(Process(pid, op))
        used.extend((pid, a, port) for port, a in enumerate(eq.parents, 1))
        generated.append((v, pid))
        artifacts.append(Artifact(v, sigma[v], False))
    graph = ProvGraph(model.domain, tuple(artifacts), tuple(processes), tuple(used), tuple(generated),
                      model.order[-1], inputs)
    return graph, Interpretation(model.domain, ops)
