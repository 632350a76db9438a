"""OPM inference rules and their audit against actual causation.

The rule set is fixed::

    x wasDerivedFrom y   :- x wasGeneratedBy p, p used y
    p wasTriggeredBy q   :- p used x, x wasGeneratedBy q
    x wasDerivedFrom+ y  :- x wasDerivedFrom y
    x wasDerivedFrom+ y  :- x wasDerivedFrom z, z wasDerivedFrom+ y
    (and likewise for wasTriggeredBy+)

so the engine is a specialised semi-naive evaluator rather than a general one.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import AuditError
from .hpcause import DEFAULT_MAX_CAUSE_SIZE, ActualCause, PartOfOracle
from .provgraph import Interpretation, ProvGraph
from .translate import TranslationOptions, to_causal

Pair = tuple[str, str]

USED = "used"
GENERATED = "wasGeneratedBy"
DERIVED = "wasDerivedFrom"
TRIGGERED = "wasTriggeredBy"
DERIVED_PLUS = "wasDerivedFrom+"
TRIGGERED_PLUS = "wasTriggeredBy+"
RELATIONS = (USED, GENERATED, DERIVED, TRIGGERED, DERIVED_PLUS, TRIGGERED_PLUS)


def transitive_closure(base: Iterable[Pair]) -> tuple[frozenset[Pair], int]:
    """Least fixpoint of the right-linear closure rule, by semi-naive iteration.

    Returns the closure and the number of rounds that derived new facts.
    """
    base = set(base)
    by_target: dict[str, list[str]] = defaultdict(list)
    for x, z in base:
        by_target[z].append(x)
    closure = set(base)
    delta = set(base)
    rounds = 0
    while delta:
        new = {(x, y) for z, y in delta for x in by_target.get(z, ())} - closure
        if new:
            rounds += 1
        closure |= new
        delta = new
    return frozenset(closure), rounds


@dataclass(frozen=True)
class EdgeBase:
    used: frozenset[Pair]
    was_generated_by: frozenset[Pair]
    was_derived_from: frozenset[Pair]
    was_triggered_by: frozenset[Pair]
    was_derived_from_plus: frozenset[Pair]
    was_triggered_by_plus: frozenset[Pair]
    rounds: int = 0

    def relation(self, name: str) -> frozenset[Pair]:
        return {
            USED: self.used,
            GENERATED: self.was_generated_by,
            DERIVED: self.was_derived_from,
            TRIGGERED: self.was_triggered_by,
            DERIVED_PLUS: self.was_derived_from_plus,
            TRIGGERED_PLUS: self.was_triggered_by_plus,
        }[name]

    def triples(self, relations: Iterable[str] = RELATIONS) -> list[tuple[str, str, str]]:
        """Canonical order: by relation (declaration order), then endpoints."""
        return [(r, a, b) for r in relations for a, b in sorted(self.relation(r))]

    def derived(self) -> list[tuple[str, str, str]]:
        return self.triples((DERIVED, TRIGGERED, DERIVED_PLUS, TRIGGERED_PLUS))

    def to_tsv(self) -> str:
        return "".join(f"{r}\t{a}\t{b}\n" for r, a, b in self.triples())


def infer(graph: ProvGraph) -> EdgeBase:
    used = frozenset((p, a) for p, a, _ in graph.used)
    generated = frozenset(graph.generated)
    generated_by: dict[str, list[str]] = defaultdict(list)
    for a, p in generated:
        generated_by[p].append(a)
    derived = frozenset((x, y) for p, y in used for x in generated_by.get(p, ()))
    producer = dict(generated)
    triggered = frozenset((p, producer[x]) for p, x in used if x in producer)
    derived_plus, r1 = transitive_closure(derived)
    triggered_plus, r2 = transitive_closure(triggered)
    return EdgeBase(used, generated, derived, triggered, derived_plus, triggered_plus, r1 + r2)


@dataclass(frozen=True)
class AuditRow:
    relation: str
    source: str
    target: str
    status: str  # "sound" | "spurious"
    witness: ActualCause | None = None
    between: str | None = None

    def to_json(self, domain) -> dict:
        out: dict = {"relation": self.relation, "from": self.source, "to": self.target, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(domain)
        if self.between is not None:
            out["between"] = self.between
        return out


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]
    max_cause_size: int

    @property
    def spurious(self) -> int:
        return sum(r.status == "spurious" for r in self.rows)

    @property
    def sound(self) -> int:
        return sum(r.status == "sound" for r in self.rows)

    def summary(self) -> str:
        return f"spurious={self.spurious} sound={self.sound}"


def _situation_oracle(graph, interp, opts, max_cause_size):
    if max_cause_size < 1:
        raise AuditError("max cause size must be at least 1")
    translation = to_causal(graph, interp, opts)
    if not translation.consistent:
        raise AuditError(f"labels inconsistent with the interpretation at {list(translation.inconsistent_nodes)}")
    return PartOfOracle(translation.situation, max_cause_size)


def audit(graph: ProvGraph, interp: Interpretation,
          opts: TranslationOptions = TranslationOptions(),
          max_cause_size: int = DEFAULT_MAX_CAUSE_SIZE) -> AuditReport:
    """Classify every derived edge as causally sound or spurious.

    An immediate edge (x, y) is sound when y is part of an actual cause of x
    and no node z strictly between them (x ->+ z ->+ y) is both caused by y and
    part of a cause of x. A transitive edge only needs y to be part of an
    actual cause of x. Verdicts are relative to ``max_cause_size``.
    """
    oracle = _situation_oracle(graph, interp, opts, max_cause_size)
    edges = infer(graph)
    rows = []
    for relation, x, y in edges.derived():
        support = oracle.support(y, x)
        between = None
        if support is not None and relation in (DERIVED, TRIGGERED):
            closure = edges.relation(DERIVED_PLUS if relation == DERIVED else TRIGGERED_PLUS)
            between = _intermediate_cause(oracle, closure, x, y)
        sound = support is not None and between is None
        rows.append(AuditRow(relation, x, y, "sound" if sound else "spurious", support, between))
    return AuditReport(tuple(rows), max_cause_size)


def _intermediate_cause(oracle: PartOfOracle, closure: frozenset[Pair], x: str, y: str) -> str | None:
    middle = sorted(z for a, z in closure if a == x and z != y and (z, y) in closure)
    for z in middle:
        if oracle(z, x) and oracle(y, z):
            return z
    return None


@dataclass(frozen=True)
class ConjectureReport:
    """Empirical check of ``x wasDerivedFrom+ y  <=>  y part of an actual cause of x``."""

    pairs_checked: int
    derived_not_causal: tuple[Pair, ...]  # closure without causation
    causal_not_derived: tuple[Pair, ...]  # causation without closure
    max_cause_size: int

    @property
    def holds(self) -> bool:
        return not self.derived_not_causal and not self.causal_not_derived

    def to_json(self) -> dict:
        return {
            "pairsChecked": self.pairs_checked,
            "maxCauseSize": self.max_cause_size,
            "derivedNotCausal": [list(p) for p in self.derived_not_causal],
            "causalNotDerived": [list(p) for p in self.causal_not_derived],
        }


def artifact_pairs(graph: ProvGraph) -> Iterator[Pair]:
    inputs = set(graph.inputs)
    for x in sorted(graph.artifact_ids):
        if x in inputs:
            continue
        for y in sorted(graph.artifact_ids):
            if y != x:
                yield x, y


def check_conjecture(graph: ProvGraph, interp: Interpretation,
                     max_cause_size: int = DEFAULT_MAX_CAUSE_SIZE,
                     opts: TranslationOptions = TranslationOptions()) -> ConjectureReport:
    """Compare wasDerivedFrom+ with part-of-actual-cause on every artifact pair."""
    oracle = _situation_oracle(graph, interp, opts, max_cause_size)
    closure = infer(graph).was_derived_from_plus
    forward, backward = [], []
    checked = 0
    for x, y in artifact_pairs(graph):
        checked += 1
        derived = (x, y) in closure
        causal = oracle(y, x)
        if derived and not causal:
            forward.append((x, y))
        elif causal and not derived:
            backward.append((x, y))
    return ConjectureReport(checked, tuple(forward), tuple(backward), max_cause_size)
