"""Halpern-Pearl weak and actual causes, decided by exhaustive search.

``X = x`` is a weak cause of ``Y = y`` in a consistent situation (M, sigma)
when some contingency ``W`` with values ``w'`` and alternative values ``x'``
flip ``Y`` (condition a), while restoring ``X = x`` under the same
contingency keeps ``Y = y`` no matter which other variables ``Z`` are reset to
their actual values (condition b). An actual cause is a weak cause with no
weak proper subset. The exogenous context stays fixed at sigma's.

Search order (determines the reported witness): contingencies ``W`` by size,
then lexicographically by variable name; for each ``W``, alternative values
``x'`` and then ``w'`` enumerated in domain order.

With ``prune=True`` four reductions are applied. Each leaves every verdict
and the first witness unchanged:

* ``W`` and ``Z`` range over ancestors of ``Y`` only; the other variables
  cannot influence ``Y``. ``Y`` itself is never useful in ``W`` or ``Z``.
* A ``W`` containing a member whose every path to ``Y`` runs through the other
  fixed variables is skipped. It behaves exactly like the smaller ``W``
  without that member, which is searched earlier.
* ``Z`` ranges over descendants of ``X`` and ``W`` that still reach ``Y``
  around the fixed variables. Resetting anything else is a no-op.
* ``x' = x`` is skipped: it would need ``Y`` to both change and keep its value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .causal import CausalSituation
from .domain import Value
from .errors import CauseQueryError

Literal = tuple[str, Value]

DEFAULT_MAX_CAUSE_SIZE = 3


@dataclass(frozen=True)
class Witness:
    contingency: tuple[str, ...]
    x_prime: tuple[Literal, ...]
    w_prime: tuple[Literal, ...]

    def to_json(self, domain) -> dict:
        return {
            "W": list(self.contingency),
            "xPrime": {k: domain.render(v) for k, v in self.x_prime},
            "wPrime": {k: domain.render(v) for k, v in self.w_prime},
        }


@dataclass(frozen=True)
class CauseQuery:
    situation: CausalSituation
    candidate: tuple[Literal, ...]
    target: Literal

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidate", tuple((x, v) for x, v in self.candidate))
        _check_target(self.situation, self.target)
        if not self.candidate:
            raise CauseQueryError("candidate cause must be nonempty")
        names = [x for x, _ in self.candidate]
        if len(set(names)) != len(names):
            raise CauseQueryError("candidate names a variable twice")
        if self.target[0] in names:
            raise CauseQueryError(f"target {self.target[0]!r} is part of the candidate")
        for x, v in self.candidate:
            _check_literal(self.situation, x, v, "candidate")


def _check_literal(situation: CausalSituation, x: str, v: Value, role: str) -> None:
    model = situation.model
    if x not in model.equations:
        raise CauseQueryError(f"{role} {x!r} is not an endogenous variable")
    if situation.valuation[x] != v:
        raise CauseQueryError(
            f"{role} {x}={v!r} contradicts the situation, where {x}={situation.valuation[x]!r}")


def _check_target(situation: CausalSituation, target: Literal) -> None:
    _check_literal(situation, target[0], target[1], "target")


@dataclass(frozen=True)
class CauseVerdict:
    weak: bool
    actual: bool
    witness: Witness | None = None
    failing_subset: tuple[Literal, ...] | None = None

    def to_json(self, domain) -> dict:
        out: dict = {"weak": self.weak, "actual": self.actual}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(domain)
        if self.failing_subset is not None:
            out["failingSubset"] = {k: domain.render(v) for k, v in self.failing_subset}
        return out


@dataclass(frozen=True)
class ActualCause:
    candidate: tuple[Literal, ...]
    witness: Witness

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.candidate)

    def to_json(self, domain) -> dict:
        return {
            "cause": {k: domain.render(v) for k, v in self.candidate},
            "witness": self.witness.to_json(domain),
        }


@dataclass
class CauseSearch:
    """Weak-cause search for one situation and one target, with a solve cache."""

    situation: CausalSituation
    target: Literal
    prune: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        _check_target(self.situation, self.target)
        model = self.situation.model
        self.model = model
        self.sigma = self.situation.valuation
        self.context = self.situation.context
        self.values = model.domain.values
        y = self.target[0]
        self.ancestors = model.ancestors(y) & set(model.equations)
        relevant = self.ancestors | {y}
        self._plan = tuple(
            (x, model.equations[x].parents, model.equations[x].fn)
            for x in model.order if x in relevant
        )
        self._base = dict(self.context)
        self._children: dict[str, list[str]] = {}
        for x in relevant:
            for p in model.equations[x].parents:
                if p in relevant:
                    self._children.setdefault(p, []).append(x)

    def _reaches_target(self, start: str, blocked: set[str]) -> bool:
        """Whether a directed path from ``start`` to the target avoids ``blocked``."""
        y = self.target[0]
        stack, seen = [start], {start}
        while stack:
            for c in self._children.get(stack.pop(), ()):
                if c == y:
                    return True
                if c not in seen and c not in blocked:
                    seen.add(c)
                    stack.append(c)
        return False

    def y_value(self, overrides: Mapping[str, Value]) -> Value:
        key = frozenset(overrides.items())
        hit = self._cache.get(key)
        if hit is None:
            values = dict(self._base)
            for x, parents, fn in self._plan:
                values[x] = overrides[x] if x in overrides else fn(tuple(values[p] for p in parents))
            hit = self._cache[key] = values[self.target[0]]
        return hit

    def weak(self, candidate: Sequence[Literal]) -> Witness | None:
        """First witness making ``candidate`` a weak cause of the target, or None."""
        y, y_val = self.target
        names = tuple(x for x, _ in candidate)
        actual = tuple(v for _, v in candidate)
        if self.prune:
            if not set(names) & self.ancestors:
                return None
            pool = sorted(self.ancestors - set(names) - {y})
        else:
            pool = sorted(set(self.model.equations) - set(names))
        for k in range(len(pool) + 1):
            for w_names in itertools.combinations(pool, k):
                if self.prune and k and self._has_blocked_member(names, w_names):
                    continue
                for x_prime in itertools.product(self.values, repeat=len(names)):
                    if self.prune and x_prime == actual:
                        continue
                    for w_prime in itertools.product(self.values, repeat=k):
                        flipped = dict(zip(names, x_prime))
                        flipped.update(zip(w_names, w_prime))
                        if self.y_value(flipped) == y_val:
                            continue
                        if self._holds_under_resets(names, actual, w_names, w_prime):
                            return Witness(w_names, tuple(zip(names, x_prime)), tuple(zip(w_names, w_prime)))
        return None

    def _has_blocked_member(self, names, w_names) -> bool:
        fixed = set(names) | set(w_names)
        return any(not self._reaches_target(w, fixed - {w}) for w in w_names)

    def _holds_under_resets(self, names, actual, w_names, w_prime) -> bool:
        y, y_val = self.target
        base = dict(zip(names, actual))
        base.update(zip(w_names, w_prime))
        fixed = set(names) | set(w_names)
        if self.prune:
            scope = self.ancestors & self.model.descendants(fixed)
            resettable = sorted(z for z in scope - fixed - {y} if self._reaches_target(z, fixed))
        else:
            resettable = sorted(set(self.model.equations) - fixed)
        if self.y_value(base) != y_val:
            return False
        full = dict(base)
        full.update((z, self.sigma[z]) for z in resettable)
        if self.y_value(full) != y_val:
            return False
        for k in range(1, len(resettable)):
            for zs in itertools.combinations(resettable, k):
                overrides = dict(base)
                overrides.update((z, self.sigma[z]) for z in zs)
                if self.y_value(overrides) != y_val:
                    return False
        return True

    def verdict(self, candidate: Sequence[Literal]) -> CauseVerdict:
        witness = self.weak(candidate)
        if witness is None:
            return CauseVerdict(False, False)
        for size in range(1, len(candidate)):
            for subset in itertools.combinations(candidate, size):
                if self.weak(subset) is not None:
                    return CauseVerdict(True, False, witness, tuple(subset))
        return CauseVerdict(True, True, witness)


def is_weak_cause(query: CauseQuery, prune: bool = True) -> CauseVerdict:
    witness = CauseSearch(query.situation, query.target, prune).weak(query.candidate)
    return CauseVerdict(witness is not None, False, witness)


def is_actual_cause(query: CauseQuery, prune: bool = True) -> CauseVerdict:
    return CauseSearch(query.situation, query.target, prune).verdict(query.candidate)


def enumerate_actual_causes(situation: CausalSituation, target: Literal,
                            max_size: int = DEFAULT_MAX_CAUSE_SIZE, prune: bool = True,
                            search: CauseSearch | None = None) -> list[ActualCause]:
    """All actual causes of ``target`` with at most ``max_size`` conjuncts.

    Ordered by size, then lexicographically by variable names. With pruning
    only ancestors of the target are considered; a candidate containing a
    non-ancestor is never minimal.
    """
    if max_size < 1:
        raise CauseQueryError("max_size must be at least 1")
    search = search or CauseSearch(situation, target, prune)
    y = target[0]
    if search.prune:
        pool = sorted(search.ancestors)
    else:
        pool = sorted(set(situation.model.equations) - {y})
    sigma = situation.valuation
    dominated: set[frozenset] = set()
    causes: list[ActualCause] = []
    for size in range(1, max_size + 1):
        for names in itertools.combinations(pool, size):
            if size > 1 and any(frozenset(sub) in dominated
                                for sub in itertools.combinations(names, size - 1)):
                dominated.add(frozenset(names))
                continue
            candidate = tuple((x, sigma[x]) for x in names)
            witness = search.weak(candidate)
            if witness is not None:
                dominated.add(frozenset(names))
                causes.append(ActualCause(candidate, witness))
    return causes


def is_part_of_actual_cause(situation: CausalSituation, variable: str, target: Literal,
                            max_size: int = DEFAULT_MAX_CAUSE_SIZE,
                            value: Value | None = None) -> bool:
    return part_of_actual_cause(situation, variable, target, max_size, value) is not None


def part_of_actual_cause(situation: CausalSituation, variable: str, target: Literal,
                         max_size: int = DEFAULT_MAX_CAUSE_SIZE,
                         value: Value | None = None) -> ActualCause | None:
    """The first actual cause (size <= max_size) containing ``variable``, if any."""
    if variable not in situation.model.equations:
        raise CauseQueryError(f"{variable!r} is not an endogenous variable")
    if value is not None and situation.valuation[variable] != value:
        return None
    for cause in enumerate_actual_causes(situation, target, max_size):
        if variable in cause.variables:
            return cause
    return None


class PartOfOracle:
    """Cached ``part of an actual cause`` answers for many targets of one situation."""

    def __init__(self, situation: CausalSituation, max_size: int = DEFAULT_MAX_CAUSE_SIZE):
        if max_size < 1:
            raise CauseQueryError("max_size must be at least 1")
        self.situation = situation
        self.max_size = max_size
        self._causes: dict[str, list[ActualCause]] = {}

    def causes_of(self, target: str) -> list[ActualCause]:
        if target not in self._causes:
            literal = (target, self.situation.valuation[target])
            self._causes[target] = enumerate_actual_causes(self.situation, literal, self.max_size)
        return self._causes[target]

    def support(self, cause: str, effect: str) -> ActualCause | None:
        """The first actual cause of ``effect`` that contains ``cause``."""
        for c in self.causes_of(effect):
            if cause in c.variables:
                return c
        return None

    def __call__(self, cause: str, effect: str) -> bool:
        return self.support(cause, effect) is not None
