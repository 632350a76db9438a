"""Finite value domains."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable

from .errors import DomainError, SchemaError

Value = Hashable


@dataclass(frozen=True)
class Domain:
    """A finite, explicitly enumerable set of data values.

    ``bool`` and ``mod`` domains hold the integers ``0..m-1`` (``m = 2`` for
    bool); ``enum`` domains hold strings in declaration order.
    """

    kind: str
    modulus: int = 2
    symbols: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "bool":
            object.__setattr__(self, "modulus", 2)
        elif self.kind == "mod":
            if self.modulus < 2:
                raise DomainError(f"modulus must be >= 2, got {self.modulus}")
        elif self.kind == "enum":
            if not self.symbols:
                raise DomainError("enum domain needs at least one value")
            if len(set(self.symbols)) != len(self.symbols):
                raise DomainError("enum domain has duplicate values")
        else:
            raise DomainError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def boolean(cls) -> Domain:
        return cls("bool")

    @classmethod
    def modular(cls, m: int) -> Domain:
        return cls("mod", modulus=m)

    @classmethod
    def enum(cls, values) -> Domain:
        return cls("enum", symbols=tuple(values))

    @property
    def numeric(self) -> bool:
        return self.kind != "enum"

    @property
    def values(self) -> tuple:
        if self.kind == "enum":
            return self.symbols
        return tuple(range(self.modulus))

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def default(self) -> Value:
        return self.values[0]

    def __contains__(self, value: object) -> bool:
        if self.kind == "enum":
            return value in self.symbols
        return isinstance(value, int) and not isinstance(value, bool) and 0 <= value < self.modulus

    def check(self, value: Any) -> Value:
        if value not in self:
            raise DomainError(f"{value!r} is not in {self.describe()}")
        return value

    def parse(self, text: str) -> Value:
        """Read a rendered value (as stored in files and on the command line)."""
        text = str(text).strip()
        if self.kind == "enum":
            return self.check(text)
        if self.kind == "bool":
            lowered = text.lower()
            if lowered == "true":
                return 1
            if lowered == "false":
                return 0
        try:
            number = int(text)
        except ValueError:
            raise DomainError(f"{text!r} is not in {self.describe()}") from None
        return self.check(number)

    def render(self, value: Value) -> str:
        return str(value)

    def index(self, value: Value) -> int:
        return self.values.index(value)

    def describe(self) -> str:
        if self.kind == "bool":
            return "bool"
        if self.kind == "mod":
            return f"integers mod {self.modulus}"
        return "enum{" + ",".join(self.symbols) + "}"

    def to_json(self) -> dict:
        if self.kind == "bool":
            return {"kind": "bool"}
        if self.kind == "mod":
            return {"kind": "mod", "m": self.modulus}
        return {"kind": "enum", "values": list(self.symbols)}

    @classmethod
    def from_json(cls, data: Any) -> Domain:
        if not isinstance(data, dict) or "kind" not in data:
            raise SchemaError("domain must be an object with a 'kind' field")
        kind = data["kind"]
        expected = {"bool": {"kind"}, "mod": {"kind", "m"}, "enum": {"kind", "values"}}
        if kind not in expected:
            raise SchemaError(f"unknown domain kind {kind!r}")
        unknown = set(data) - expected[kind]
        if unknown:
            raise SchemaError(f"unknown field(s) in domain: {sorted(unknown)}")
        missing = expected[kind] - set(data)
        if missing:
            raise SchemaError(f"domain of kind {kind!r} is missing {sorted(missing)}")
        try:
            if kind == "bool":
                return cls.boolean()
            if kind == "mod":
                if not isinstance(data["m"], int):
                    raise SchemaError("domain 'm' must be an integer")
                return cls.modular(data["m"])
            values = data["values"]
            if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
                raise SchemaError("enum domain 'values' must be a list of strings")
            return cls.enum(values)
        except DomainError as exc:
            raise SchemaError(str(exc)) from None

    @classmethod
    def from_text(cls, text: str) -> Domain:
        """Parse the command-line shorthand ``bool``, ``mod:M`` or ``enum:a|b|c``."""
        if text == "bool":
            return cls.boolean()
        kind, _, rest = text.partition(":")
        if kind == "mod" and rest.isdigit():
            return cls.modular(int(rest))
        if kind == "enum" and rest:
            return cls.enum(rest.split("|"))
        raise DomainError(f"cannot parse domain {text!r}; use bool, mod:M or enum:a|b")
