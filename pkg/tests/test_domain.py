from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from provcause.domain import Domain
from provcause.errors import DomainError, FunctionSpecError, SchemaError
from provcause.functions import Builtin, Constant, Faulted, Table, depends_on, make_function, tabulate


class TestDomain:
    def test_values(self):
        assert Domain.boolean().values == (0, 1)
        assert Domain.modular(5).values == (0, 1, 2, 3, 4)
        assert Domain.enum(["lo", "hi"]).values == ("lo", "hi")

    def test_membership_rejects_python_bools(self):
        assert 1 in Domain.boolean()
        assert True not in Domain.boolean()
        assert 2 not in Domain.boolean()

    @pytest.mark.parametrize("bad", [lambda: Domain.modular(1), lambda: Domain.enum([]),
                                     lambda: Domain.enum(["a", "a"]), lambda: Domain("real")])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            bad()

    def test_parse(self):
        assert Domain.boolean().parse("true") == 1
        assert Domain.boolean().parse(" 0 ") == 0
        assert Domain.modular(7).parse("6") == 6
        with pytest.raises(DomainError):
            Domain.modular(7).parse("7")
        with pytest.raises(DomainError):
            Domain.enum(["a"]).parse("b")

    @pytest.mark.parametrize("domain", [Domain.boolean(), Domain.modular(9), Domain.enum(["x", "y"])])
    def test_json_round_trip(self, domain):
        assert Domain.from_json(domain.to_json()) == domain

    def test_json_rejects_unknown_fields(self):
        with pytest.raises(SchemaError):
            Domain.from_json({"kind": "bool", "m": 2})
        with pytest.raises(SchemaError):
            Domain.from_json({"kind": "mod"})

    def test_from_text(self):
        assert Domain.from_text("mod:97") == Domain.modular(97)
        assert Domain.from_text("enum:a|b") == Domain.enum(["a", "b"])
        with pytest.raises(DomainError):
            Domain.from_text("mod:x")


class TestFunctions:
    B = Domain.boolean()

    def test_builtins(self):
        assert Builtin("and", 3, self.B)((1, 1, 0)) == 0
        assert Builtin("or", 2, self.B)((0, 1)) == 1
        assert Builtin("not", 1, self.B)((0,)) == 1
        assert Builtin("xor", 3, self.B)((1, 1, 1)) == 1
        m7 = Domain.modular(7)
        assert Builtin("add-mod", 2, m7)((5, 4)) == 2
        assert Builtin("mul-mod", 2, m7)((3, 3)) == 2
        assert Builtin("mul-mod", 0, m7)(()) == 1

    def test_builtin_restrictions(self):
        with pytest.raises(FunctionSpecError):
            Builtin("and", 2, Domain.modular(3))
        with pytest.raises(FunctionSpecError):
            Builtin("not", 2, self.B)
        with pytest.raises(FunctionSpecError):
            Builtin("nand", 2, self.B)

    def test_constant_spec(self):
        fn = make_function({"builtin": "const-1"}, 2, self.B)
        assert isinstance(fn, Constant)
        assert {fn(a) for a in itertools.product((0, 1), repeat=2)} == {1}

    def test_table_needs_every_row(self):
        rows = [["0", "0"], ["1", "1"]]
        assert make_function({"table": rows}, 1, self.B)((1,)) == 1
        with pytest.raises(FunctionSpecError, match="rows"):
            make_function({"table": rows[:1]}, 1, self.B)
        with pytest.raises(FunctionSpecError, match="duplicate"):
            make_function({"table": [["0", "0"], ["0", "1"]]}, 1, self.B)

    def test_faulted(self):
        fn = Faulted(Builtin("and", 2, self.B), Builtin("xor", 2, self.B))
        assert fn.arity == 3
        assert fn((1, 1, 0)) == 1 and fn((1, 1, 1)) == 0

    def test_depends_on(self):
        assert depends_on(Builtin("and", 2, self.B), 0, self.B)
        assert not depends_on(Constant(1, 2), 1, self.B)

    @given(st.lists(st.integers(0, 1), min_size=4, max_size=4))
    def test_tabulate_round_trips_through_spec(self, outputs):
        table = Table(2, tuple(zip(itertools.product((0, 1), repeat=2), outputs)))
        rebuilt = make_function(table.to_spec(), 2, self.B)
        assert tabulate(rebuilt, self.B) == table
