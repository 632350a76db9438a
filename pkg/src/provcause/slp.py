"""A tiny straight-line language for subject functions, and provenance semantics for it.

Grammar::

    program   := "input" IDENT ("," IDENT)* ";" stmt* "return" IDENT [";"]
    stmt      := IDENT ":=" rhs ";" | "repeat" IDENT "{" stmt* "}"
    rhs       := OP "(" atom ("," atom)* ")" | atom | "if" IDENT "then" rhs "else" rhs
    atom      := IDENT | INT

Guards and repeat counts must be input variables, so the shape of every run
depends on the inputs alone. A variable may be reassigned only inside a
``repeat`` body; every variable assigned inside a loop is versioned
``v@0, v@1, ...`` (one version per executed assignment), all others keep
their plain name. Arithmetic is modulo the domain size.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

from .domain import Domain, Value
from .errors import DomainError, InterventionError, ParseError, ProgramError, SemanticsRefused
from .functions import Builtin, Constant
from .provgraph import Artifact, Interpretation, Operation, ProvGraph, Process

OPS = {"add": "add-mod", "mul": "mul-mod", "and": "and", "or": "or", "not": "not", "xor": "xor", "copy": "copy"}
KEYWORDS = {"input", "return", "repeat", "if", "then", "else"}
SEMANTICS_KINDS = ("trivial", "trace", "static")


@dataclass(frozen=True)
class Atom:
    name: str | None = None
    literal: int | None = None


@dataclass(frozen=True)
class Call:
    op: str
    args: tuple[Atom, ...]


@dataclass(frozen=True)
class Cond:
    guard: str
    then: Rhs
    orelse: Rhs


Rhs = Union[Atom, Call, Cond]


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Rhs


@dataclass(frozen=True)
class Repeat:
    count: str
    body: tuple


@dataclass(frozen=True)
class Program:
    inputs: tuple[str, ...]
    body: tuple
    result: str
    versioned: frozenset[str] = frozenset()

    @property
    def straight_line(self) -> bool:
        """No loops and no conditionals anywhere."""
        def plain(rhs):
            if isinstance(rhs, Cond):
                return False
            return True
        return all(isinstance(s, Assign) and plain(s.rhs) for s in self.body)

    def calls(self) -> set[tuple[str, int]]:
        found: set[tuple[str, int]] = set()

        def visit_rhs(rhs):
            if isinstance(rhs, Call):
                found.add((rhs.op, len(rhs.args)))
            elif isinstance(rhs, Cond):
                visit_rhs(rhs.then)
                visit_rhs(rhs.orelse)

        def visit(stmts):
            for s in stmts:
                if isinstance(s, Repeat):
                    visit(s.body)
                else:
                    visit_rhs(s.rhs)

        visit(self.body)
        return found


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<tok>:=|[A-Za-z_][A-Za-z0-9_]*|\d+|[(),;{}])")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    tokens, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        if m.group("tok"):
            tokens.append(_Tok(m.group("tok"), line, pos - line_start + 1))
        chunk = m.group(0)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Tok("<end>", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.tokens[self.i]

    def fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def take(self, expected: str | None = None) -> _Tok:
        tok = self.tok
        if expected is not None and tok.text != expected:
            self.fail(f"expected {expected!r}, found {tok.text!r}")
        self.i += 1
        return tok

    def ident(self) -> _Tok:
        tok = self.tok
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok.text) or tok.text in KEYWORDS:
            self.fail(f"expected an identifier, found {tok.text!r}")
        self.i += 1
        return tok

    def program(self):
        self.take("input")
        inputs = [self.ident()]
        while self.tok.text == ",":
            self.take(",")
            inputs.append(self.ident())
        self.take(";")
        body = self.stmts(until="return")
        self.take("return")
        result = self.ident()
        if self.tok.text == ";":
            self.take(";")
        if self.tok.text != "<end>":
            self.fail(f"unexpected {self.tok.text!r} after return")
        return inputs, body, result

    def stmts(self, until: str) -> list:
        out = []
        while self.tok.text != until:
            if self.tok.text == "<end>":
                self.fail(f"expected {until!r} before end of input")
            out.append(self.stmt(until))
        return out

    def stmt(self, until: str):
        if self.tok.text == "repeat":
            start = self.take("repeat")
            count = self.ident()
            self.take("{")
            body = self.stmts(until="}")
            self.take("}")
            return ("repeat", start, count, body)
        target = self.ident()
        self.take(":=")
        rhs = self.rhs()
        # the final statement of a block may omit its semicolon
        if self.tok.text == ";" or self.tok.text not in ("}", until):
            self.take(";")
        return ("assign", target, rhs)

    def rhs(self):
        if self.tok.text == "if":
            self.take("if")
            guard = self.ident()
            self.take("then")
            then = self.rhs()
            self.take("else")
            return ("cond", guard, then, self.rhs())
        tok = self.tok
        if tok.text.isdigit():
            self.i += 1
            return ("lit", tok)
        name = self.ident()
        if self.tok.text == "(":
            self.take("(")
            args = [self.atom()]
            while self.tok.text == ",":
                self.take(",")
                args.append(self.atom())
            self.take(")")
            return ("call", name, args)
        return ("var", name)

    def atom(self):
        tok = self.tok
        if tok.text.isdigit():
            self.i += 1
            return ("lit", tok)
        return ("var", self.ident())


def parse(text: str) -> Program:
    """Parse and statically check a program; errors carry line/column."""
    inputs, body, result = _Parser(text).program()
    names = [t.text for t in inputs]
    if len(set(names)) != len(names):
        raise ProgramError("duplicate input name")
    input_set = frozenset(names)
    versioned: set[str] = set()

    def err(message: str, tok: _Tok):
        raise ProgramError(f"{message} (line {tok.line}, column {tok.col})")

    def atom(node, defined) -> Atom:
        if node[0] == "lit":
            return Atom(literal=int(node[1].text))
        tok = node[1]
        if tok.text not in defined:
            err(f"use of {tok.text!r} before assignment", tok)
        return Atom(name=tok.text)

    def rhs(node, defined) -> Rhs:
        kind = node[0]
        if kind == "cond":
            guard = node[1]
            if guard.text not in defined:
                err(f"use of {guard.text!r} before assignment", guard)
            if guard.text not in input_set:
                err(f"guard {guard.text!r} must be an input variable", guard)
            return Cond(guard.text, rhs(node[2], defined), rhs(node[3], defined))
        if kind == "call":
            op = node[1]
            if op.text not in OPS:
                err(f"unknown operator {op.text!r}", op)
            args = tuple(atom(a, defined) for a in node[2])
            if op.text in ("not", "copy") and len(args) != 1:
                err(f"{op.text} takes exactly one argument", op)
            return Call(op.text, args)
        return atom(node, defined)

    def block(nodes, defined: set[str], in_loop: bool) -> tuple:
        out = []
        for node in nodes:
            if node[0] == "repeat":
                count = node[2]
                if count.text not in defined:
                    err(f"use of {count.text!r} before assignment", count)
                if count.text not in input_set:
                    err(f"repeat count {count.text!r} must be an input variable", count)
                inner = set(defined)
                out.append(Repeat(count.text, block(node[3], inner, True)))
                continue
            target = node[1]
            value = rhs(node[2], defined)
            if target.text in input_set:
                err(f"cannot assign to input {target.text!r}", target)
            if target.text in defined and not in_loop:
                err(f"{target.text!r} reassigned outside a repeat body", target)
            if in_loop:
                versioned.add(target.text)
            defined.add(target.text)
            out.append(Assign(target.text, value))
        return tuple(out)

    defined = set(input_set)
    stmts = block(body, defined, False)
    if result.text not in defined:
        err(f"returned variable {result.text!r} is never assigned", result)
    return Program(tuple(names), stmts, result.text, frozenset(versioned))


# --- execution ---------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One executed assignment: ``var := op(args)`` with conditionals resolved.

    ``op`` is an operator name, ``"copy"`` for a bare variable, or ``"const"``
    for a bare literal. Each arg is ``("var", name)`` or ``("lit", value)``.
    """

    var: str
    op: str
    args: tuple[tuple[str, object], ...]
    value: Value


@dataclass(frozen=True)
class Run:
    inputs: dict[str, Value]
    steps: tuple[Step, ...]
    result_var: str
    result: Value

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(s.var for s in self.steps)

    def valuation(self) -> dict[str, Value]:
        return {s.var: s.value for s in self.steps}


@lru_cache(maxsize=None)
def _builtin(op: str, arity: int, domain: Domain) -> Builtin:
    return Builtin(OPS[op], arity, domain)


def _apply(op: str, args: tuple, domain: Domain) -> Value:
    if op == "const":
        return args[0]
    return _builtin(op, len(args), domain)(args)


def _check_domain(domain: Domain) -> None:
    if not domain.numeric:
        raise DomainError("straight-line programs need a bool or mod domain")


def _bind_inputs(program: Program, domain: Domain, inputs) -> dict[str, Value]:
    if isinstance(inputs, Mapping):
        missing = [v for v in program.inputs if v not in inputs]
        if missing:
            raise DomainError(f"missing inputs {missing}")
        values = {v: inputs[v] for v in program.inputs}
    else:
        inputs = tuple(inputs)
        if len(inputs) != len(program.inputs):
            raise DomainError(f"expected {len(program.inputs)} inputs, got {len(inputs)}")
        values = dict(zip(program.inputs, inputs))
    for v, x in values.items():
        if x not in domain:
            raise DomainError(f"input {v}={x!r} is not in {domain.describe()}")
    return values


def run(program: Program, domain: Domain, inputs, force: Mapping[str, Value] | None = None) -> Run:
    """Execute ``program``; variables in ``force`` take the given value at their assignment."""
    _check_domain(domain)
    env = _bind_inputs(program, domain, inputs)
    values: dict[str, Value] = dict(env)
    current = {v: v for v in program.inputs}
    counters: dict[str, int] = {}
    steps: list[Step] = []
    force = force or {}

    def resolve(rhs: Rhs):
        while isinstance(rhs, Cond):
            rhs = rhs.then if values[current[rhs.guard]] else rhs.orelse
        if isinstance(rhs, Atom):
            if rhs.name is None:
                return "const", (("lit", rhs.literal % domain.modulus),)
            return "copy", (("var", current[rhs.name]),)
        args = tuple(("var", current[a.name]) if a.name is not None else ("lit", a.literal % domain.modulus)
                     for a in rhs.args)
        return rhs.op, args

    def execute(stmts):
        for s in stmts:
            if isinstance(s, Repeat):
                for _ in range(int(values[current[s.count]])):
                    execute(s.body)
                continue
            if s.target in program.versioned:
                k = counters.get(s.target, 0)
                counters[s.target] = k + 1
                name = f"{s.target}@{k}"
            else:
                name = s.target
            op, args = resolve(s.rhs)
            if name in force:
                value = force[name]
            else:
                value = _apply(op, tuple(values[a] if kind == "var" else a for kind, a in args), domain)
            values[name] = value
            current[s.target] = name
            steps.append(Step(name, op, args, value))

    execute(program.body)
    result_var = current[program.result]
    return Run(env, tuple(steps), result_var, values[result_var])


@dataclass(frozen=True)
class ProgramCausalFunction:
    """The program as a causal function: inputs are exogenous, assigned versions endogenous.

    ``f(inputs, tau)`` re-executes the program with each variable in ``tau``
    forced at its assignment point.
    """

    program: Program
    domain: Domain

    def variables(self, inputs) -> tuple[str, ...]:
        return run(self.program, self.domain, inputs).variables

    def __call__(self, inputs, tau: Mapping[str, Value] | None = None) -> dict[str, Value]:
        tau = dict(tau or {})
        if tau:
            known = set(self.variables(inputs))
            unknown = sorted(set(tau) - known)
            if unknown:
                raise InterventionError(f"intervention names {unknown}, not assigned in this run")
            for v in tau.values():
                self.domain.check(v)
        return run(self.program, self.domain, inputs, tau).valuation()

    def mechanisms(self, inputs) -> dict[str, tuple[tuple[str, ...], Callable[[tuple], Value]]]:
        """Per variable: its parent variables and its equation given fixed inputs."""
        r = run(self.program, self.domain, inputs)
        assigned = set(r.variables)
        out = {}
        for step in r.steps:
            parents = tuple(dict.fromkeys(a for kind, a in step.args if kind == "var" and a in assigned))
            out[step.var] = (parents, _mechanism(step, parents, r.inputs, self.domain))
        return out


def _mechanism(step: Step, parents: tuple[str, ...], inputs: Mapping[str, Value], domain: Domain):
    index = {p: i for i, p in enumerate(parents)}

    def fn(parent_values: tuple) -> Value:
        args = []
        for kind, a in step.args:
            if kind == "lit":
                args.append(a)
            elif a in index:
                args.append(parent_values[index[a]])
            else:
                args.append(inputs[a])
        return _apply(step.op, tuple(args), domain)

    return fn


def reference_causal_function(program: Program, domain: Domain) -> ProgramCausalFunction:
    _check_domain(domain)
    return ProgramCausalFunction(program, domain)


# --- provenance semantics ---------------------------------------------------


def process_name(op: str, arity: int) -> str:
    return f"{op}/{arity}"


def const_name(value: Value) -> str:
    return f"const-{value}/0"


def program_interpretation(program: Program, domain: Domain) -> Interpretation:
    """Process names used by the emitted graphs: ``op/arity``, ``copy/1``, ``const-k/0``."""
    _check_domain(domain)
    ops: dict[str, Operation] = {}
    for op, n in sorted(program.calls()):
        name = process_name(op, n)
        ops[name] = Operation(name, n, _builtin(op, n, domain))
    ops["copy/1"] = Operation("copy/1", 1, Builtin("copy", 1, domain))
    for k in domain.values:
        ops[const_name(k)] = Operation(const_name(k), 0, Constant(k))
    return Interpretation(domain, ops)


class _GraphBuilder:
    def __init__(self, domain: Domain, inputs: Mapping[str, Value]):
        self.domain = domain
        self.artifacts = [Artifact(v, x, True) for v, x in inputs.items()]
        self.processes: list[Process] = []
        self.used: list[tuple[str, str, int]] = []
        self.generated: list[tuple[str, str]] = []
        self.inputs = tuple(inputs)

    def add(self, artifact: str, value: Value, process: str, name: str, uses: Sequence[str] = ()) -> None:
        self.artifacts.append(Artifact(artifact, value, False))
        self.processes.append(Process(process, name))
        self.generated.append((artifact, process))
        self.used.extend((process, a, i) for i, a in enumerate(uses, 1))

    def build(self, result: str) -> ProvGraph:
        return ProvGraph(self.domain, tuple(self.artifacts), tuple(self.processes), tuple(self.used),
                         tuple(self.generated), result, self.inputs)


def _emit_trace(r: Run, domain: Domain) -> ProvGraph:
    g = _GraphBuilder(domain, r.inputs)
    for step in r.steps:
        if step.op == "const":
            g.add(step.var, step.value, f"p:{step.var}", const_name(step.args[0][1]))
            continue
        uses = []
        for i, (kind, a) in enumerate(step.args, 1):
            if kind == "var":
                uses.append(a)
            else:
                k = f"k:{step.var}:{i}"
                g.add(k, a, f"p:{k}", const_name(a))
                uses.append(k)
        g.add(step.var, step.value, f"p:{step.var}", process_name(step.op, len(uses)), uses)
    return g.build(r.result_var)


def _emit_trivial(r: Run, domain: Domain) -> ProvGraph:
    g = _GraphBuilder(domain, r.inputs)
    for step in r.steps:
        g.add(step.var, step.value, f"p:{step.var}", const_name(step.value))
    result = r.result_var
    if result in r.inputs:
        result = f"out:{result}"
        g.add(result, r.result, f"p:{result}", const_name(r.result))
    return g.build(result)


def emit(program: Program, kind: str, inputs, domain: Domain) -> ProvGraph:
    """The provenance graph a semantics assigns to one run."""
    if kind not in SEMANTICS_KINDS:
        raise SemanticsRefused(f"unknown semantics {kind!r}")
    if kind == "static" and not program.straight_line:
        raise SemanticsRefused("static semantics needs a program without repeat or if")
    r = run(program, domain, inputs)
    if kind == "trivial":
        return _emit_trivial(r, domain)
    return _emit_trace(r, domain)


@dataclass(frozen=True)
class Semantics:
    """A provenance semantics for a program: inputs -> provenance graph."""

    kind: str
    program: Program
    domain: Domain
    emitter: Callable[[tuple], ProvGraph] | None = field(default=None, compare=False)
    interpretation: Interpretation = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.emitter is None:
            if self.kind not in SEMANTICS_KINDS:
                raise SemanticsRefused(f"unknown semantics {self.kind!r}")
            if self.kind == "static" and not self.program.straight_line:
                raise SemanticsRefused("static semantics needs a program without repeat or if")
        object.__setattr__(self, "interpretation", program_interpretation(self.program, self.domain))

    def graph(self, inputs) -> ProvGraph:
        if self.emitter is not None:
            return self.emitter(tuple(inputs))
        return emit(self.program, self.kind, inputs, self.domain)

    def input_space(self) -> list[tuple]:
        return list(itertools.product(self.domain.values, repeat=len(self.program.inputs)))

    @property
    def reference(self) -> ProgramCausalFunction:
        return ProgramCausalFunction(self.program, self.domain)

    def f(self, inputs) -> Value:
        return run(self.program, self.domain, inputs).result


def semantics(program: Program, kind: str, domain: Domain) -> Semantics:
    return Semantics(kind, program, domain)
