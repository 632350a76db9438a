"""Total functions over a finite domain: builtins, tables, constants.

All function objects are immutable, hashable, compare by value, and are called
with a single tuple of argument values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable

from .domain import Domain, Value
from .errors import DomainError, FunctionSpecError

BUILTIN_NAMES = ("and", "or", "not", "xor", "add-mod", "mul-mod", "copy")
BOOLEAN_ONLY = {"and", "or", "not", "xor"}
UNARY = {"not", "copy"}


def _kernel(name: str, modulus: int) -> Callable[[tuple], Value]:
    if name == "and":
        return lambda args: int(all(args))
    if name == "or":
        return lambda args: int(any(args))
    if name == "not":
        return lambda args: 1 - args[0]
    if name == "xor":
        return lambda args: sum(args) % 2
    if name == "add-mod":
        return lambda args: sum(args) % modulus
    if name == "mul-mod":
        return lambda args: reduce(lambda a, b: a * b % modulus, args, 1 % modulus)
    if name == "copy":
        return lambda args: args[0]
    raise FunctionSpecError(f"unknown builtin {name!r}")


@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    domain: Domain
    _call: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.name not in BUILTIN_NAMES:
            raise FunctionSpecError(f"unknown builtin {self.name!r}")
        if self.arity < 0:
            raise FunctionSpecError("arity must be non-negative")
        if self.name in UNARY and self.arity != 1:
            raise FunctionSpecError(f"builtin {self.name!r} has arity 1, declared {self.arity}")
        if self.name in BOOLEAN_ONLY and self.domain.kind != "bool":
            raise FunctionSpecError(f"builtin {self.name!r} needs a bool domain, got {self.domain.describe()}")
        if self.name in ("add-mod", "mul-mod") and not self.domain.numeric:
            raise FunctionSpecError(f"builtin {self.name!r} needs a numeric domain")
        object.__setattr__(self, "_call", _kernel(self.name, self.domain.modulus))

    def __call__(self, args: tuple) -> Value:
        return self._call(args)

    def to_spec(self) -> dict:
        return {"builtin": self.name}


@dataclass(frozen=True)
class Constant:
    """Ignores its arguments; also the equation installed by an intervention."""

    value: Value
    arity: int = 0

    def __call__(self, args: tuple) -> Value:
        return self.value

    def to_spec(self) -> dict:
        return {"builtin": f"const-{self.value}"}


@dataclass(frozen=True)
class Table:
    arity: int
    rows: tuple[tuple[tuple, Value], ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lookup", dict(self.rows))

    @classmethod
    def from_mapping(cls, domain: Domain, arity: int, mapping: dict) -> Table:
        rows = []
        for args in itertools.product(domain.values, repeat=arity):
            if args not in mapping:
                raise FunctionSpecError(f"table is not total: no row for {args}")
            rows.append((args, domain.check(mapping[args])))
        if len(mapping) != len(rows):
            raise FunctionSpecError("table has rows outside the domain")
        return cls(arity, tuple(rows))

    def __call__(self, args: tuple) -> Value:
        return self._lookup[args]

    def to_spec(self) -> dict:
        return {"table": [[str(a) for a in args] + [str(out)] for args, out in self.rows]}


@dataclass(frozen=True)
class Faulted:
    """``combiner(inner(args[:-1]), args[-1])``: an operation with a fault term appended."""

    inner: Any
    combiner: Builtin

    @property
    def arity(self) -> int:
        return self.inner.arity + 1

    def __call__(self, args: tuple) -> Value:
        return self.combiner((self.inner(args[:-1]), args[-1]))

    def to_spec(self) -> dict:
        return tabulate(self, self.combiner.domain).to_spec()


def tabulate(fn, domain: Domain) -> Table:
    """Expand any function into an explicit table over ``domain``."""
    mapping = {args: fn(args) for args in itertools.product(domain.values, repeat=fn.arity)}
    return Table.from_mapping(domain, fn.arity, mapping)


def make_function(spec: Any, arity: int, domain: Domain):
    """Build a function from its JSON spec ``{"builtin": name}`` or ``{"table": rows}``."""
    if not isinstance(spec, dict) or len(spec) != 1 or not ({"builtin", "table"} & set(spec)):
        raise FunctionSpecError("function spec must be {'builtin': name} or {'table': rows}")
    if "builtin" in spec:
        name = spec["builtin"]
        if not isinstance(name, str):
            raise FunctionSpecError("builtin name must be a string")
        if name.startswith("const-"):
            try:
                return Constant(domain.parse(name[len("const-"):]), arity)
            except DomainError as exc:
                raise FunctionSpecError(f"bad constant {name!r}: {exc}") from None
        return Builtin(name, arity, domain)
    rows = spec["table"]
    if not isinstance(rows, list):
        raise FunctionSpecError("table must be a list of rows")
    expected = domain.size ** arity
    if len(rows) != expected:
        raise FunctionSpecError(f"table has {len(rows)} rows, expected |D|^{arity} = {expected}")
    mapping: dict = {}
    for row in rows:
        if not isinstance(row, list) or len(row) != arity + 1:
            raise FunctionSpecError(f"table row {row!r} must have {arity} arguments and one output")
        try:
            values = tuple(domain.parse(cell) for cell in row)
        except DomainError as exc:
            raise FunctionSpecError(f"table row {row!r}: {exc}") from None
        if values[:-1] in mapping:
            raise FunctionSpecError(f"duplicate table row for arguments {row[:-1]}")
        mapping[values[:-1]] = values[-1]
    return Table.from_mapping(domain, arity, mapping)


def depends_on(fn, position: int, domain: Domain) -> bool:
    """True iff changing argument ``position`` alone can change the output."""
    others = itertools.product(domain.values, repeat=fn.arity - 1)
    for rest in others:
        outputs = {fn(rest[:position] + (v,) + rest[position:]) for v in domain.values}
        if len(outputs) > 1:
            return True
    return False
