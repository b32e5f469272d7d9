"""Lowering, assert-to-assume rewriting, model validation, and decoding."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logicforge.errors import DecodeError
from logicforge.frontend import check
from logicforge.frontend.ast import Assert, Assign, Assume, Compare, IntLit, LocalRef
from logicforge.model import (
    CCmp,
    CElem,
    CLit,
    decode,
    dump_model,
    encode,
    lower,
    rewrite_assert_as_assume,
    validate_model,
)
from logicforge.model.constraints import IntRange

from conftest import compile_source
from strategies import programs

MINIMAL_SOURCE = (
    "class C:\n    f: Domain[int, range(1, 2)]\n"
    "def v(x: C) -> None:\n    assume(x.f == 1)\n"
)

CLUE1_SOURCE = (
    'class House:\n'
    '    name: Unique[Domain[str, "Alice", "Bob", "Carol"]]\n'
    '    phone: Unique[Domain[str, "iphone 13", "xiaomi mi 11", "oneplus 9"]]\n'
    'class PuzzleSolution:\n'
    '    houses: list[House, 3]\n'
    'def validate(solution: PuzzleSolution) -> None:\n'
    '    bob = nondet(solution.houses)\n'
    '    assume(bob.name == "Bob")\n'
    '    assert bob.phone == "xiaomi mi 11"\n'
)


class TestLower:
    def test_worked_example_var_and_group_counts(self, zebra_model):
        # 4 instances x 5 scalar fields
        assert len(zebra_model.vars) == 20
        # one alldiff group per Unique field, each spanning the 4 instances
        assert len(zebra_model.alldiff_groups) == 5
        assert all(len(g) == 4 for g in zebra_model.alldiff_groups)
        # one selector per nondet call site
        assert len(zebra_model.selectors) == 12
        validate_model(zebra_model)

    def test_nondet_assume_assert_lowering(self):
        _, model = compile_source(CLUE1_SOURCE)
        assert len(model.selectors) == 1
        sel = model.selectors[0]
        assert sel.list_len == 3
        assert sel.element_class == "House"
        assert len(model.constraints) == 2
        name_cmp, phone_cmp = model.constraints
        # both constraints select through the same selector
        for cmp_, field_idx, code in ((name_cmp, 0, 1), (phone_cmp, 1, 1)):
            assert isinstance(cmp_, CCmp) and cmp_.op == "=="
            assert isinstance(cmp_.left, CElem)
            assert cmp_.left.selector == sel.id
            assert cmp_.right == CLit(code)  # "Bob" and "xiaomi mi 11" both code 1

    def test_minimal_model(self):
        from logicforge.model import CVar

        _, model = compile_source(MINIMAL_SOURCE)
        assert len(model.vars) == 1
        assert model.vars[0].domain == IntRange(1, 2)
        assert model.constraints == [CCmp("==", CVar(0), CLit(1))]

    def test_var_names_follow_paths(self, zebra_model):
        assert zebra_model.vars[0].name == "houses[0].house_number"
        assert zebra_model.vars[6].name == "houses[1].name"

    def test_lowering_is_deterministic(self, zebra_program):
        a, b = lower(zebra_program), lower(zebra_program)
        assert a.constraints == b.constraints
        assert a.vars == b.vars
        assert a.alldiff_groups == b.alldiff_groups

    def test_oversized_alldiff_group_lowers_cleanly(self):
        # group of 3 over a 2-value domain: lowering succeeds, solver says unsat
        src = (
            "class E:\n    f: Unique[Domain[int, range(0, 2)]]\n"
            "class S:\n    items: list[E, 3]\n"
            "def v(s: S) -> None:\n    assume(s.items[0].f == 0)\n"
        )
        _, model = compile_source(src)
        validate_model(model)
        assert len(model.alldiff_groups[0]) == 3


class TestRewrite:
    def test_assert_becomes_assume(self):
        a = Assume(Compare("==", LocalRef("x"), IntLit(1)))
        b = Assert(Compare("==", LocalRef("y"), IntLit(2)))
        out = rewrite_assert_as_assume([a, b])
        assert out == (a, Assume(b.expr))

    def test_empty(self):
        assert rewrite_assert_as_assume([]) == ()

    def test_duplicates_kept(self):
        b = Assert(Compare("==", LocalRef("y"), IntLit(2)))
        out = rewrite_assert_as_assume([b, b])
        assert out == (Assume(b.expr), Assume(b.expr))
        assert len(out) == 2

    @settings(max_examples=30, deadline=None)
    @given(programs())
    def test_order_preserved_and_no_asserts_remain(self, program):
        body = program.functions[0].body
        out = rewrite_assert_as_assume(body)
        assert len(out) == len(body)
        assert not any(isinstance(s, Assert) for s in out)
        for before, after in zip(body, out):
            if isinstance(before, Assign):
                assert before == after
            else:
                assert isinstance(after, Assume)
                assert after.expr == (before.expr)
        # idempotent
        assert rewrite_assert_as_assume(out) == out


class TestDecode:
    def test_rows_ordered_by_position_field(self, zebra_model):
        # hand-build an assignment with instances stored right-to-left
        assignment = {}
        layout = zebra_model.layout
        perm = [3, 2, 1, 0]  # slot i holds house perm[i]+1
        truth_by_pos = {
            1: ("Alice", "engineer", "romance", "google pixel 6"),
            2: ("Peter", "artist", "fantasy", "samsung galaxy s21"),
            3: ("Eric", "teacher", "science fiction", "iphone 13"),
            4: ("Arnold", "doctor", "mystery", "oneplus 9"),
        }
        for slot, row in enumerate(layout.rows):
            pos = perm[slot] + 1
            name, occupation, book, phone = truth_by_pos[pos]
            values = {
                "house_number": pos,
                "name": name,
                "occupation": occupation,
                "book": book,
                "phone": phone,
            }
            for col, vid in row.fields.items():
                value = values[col]
                domain = zebra_model.vars[vid].domain
                assignment[vid] = (
                    value if isinstance(value, int) else domain.values.index(value)
                )
        table = decode(zebra_model, assignment)
        assert [r["house_number"] for r in table.rows] == [1, 2, 3, 4]
        assert table.rows[0]["name"] == "Alice"
        assert table.rows[3]["phone"] == "oneplus 9"

    def test_single_var_decode(self):
        _, model = compile_source(MINIMAL_SOURCE)
        table = decode(model, {0: 1})
        assert len(table.rows) == 1
        assert table.rows[0] == {"f": 1}

    def test_missing_var_raises(self):
        _, model = compile_source(MINIMAL_SOURCE)
        with pytest.raises(DecodeError):
            decode(model, {})

    def test_encode_round_trip_on_worked_example(self, zebra_model):
        from logicforge.solver import solve

        table = decode(zebra_model, solve(zebra_model).assignment)
        assert decode(zebra_model, encode(zebra_model, table)) == table

    @settings(max_examples=30, deadline=None)
    @given(programs(), st.randoms(use_true_random=False))
    def test_decode_encode_bijection(self, program, rnd):
        from logicforge.errors import SemanticError

        try:
            checked = check(program)
        except SemanticError:
            return
        model = lower(checked)
        validate_model(model)
        # random canonical-slot-order assignment
        assignment = {v.id: rnd.choice(list(v.values())) for v in model.vars}
        table = decode(model, assignment)
        if model.layout.position_field is None:
            # no sorting: decode is a bijection on raw assignments
            assert encode(model, table) == assignment
        else:
            # sorting loses slot order; the canonical form round-trips
            canonical = encode(model, table)
            assert decode(model, canonical) == table


class TestDump:
    def test_golden_dump(self):
        _, model = compile_source(CLUE1_SOURCE)
        expected = (
            "var 0 houses[0].name : {Alice, Bob, Carol}\n"
            "var 1 houses[0].phone : {iphone 13, xiaomi mi 11, oneplus 9}\n"
            "var 2 houses[1].name : {Alice, Bob, Carol}\n"
            "var 3 houses[1].phone : {iphone 13, xiaomi mi 11, oneplus 9}\n"
            "var 4 houses[2].name : {Alice, Bob, Carol}\n"
            "var 5 houses[2].phone : {iphone 13, xiaomi mi 11, oneplus 9}\n"
            "selector 6 choice0 : index[0, 3) of House\n"
            "alldiff 0 2 4\n"
            "alldiff 1 3 5\n"
            "constraint (== (elem s6 [v0 v2 v4]) 1)\n"
            "constraint (== (elem s6 [v1 v3 v5]) 1)\n"
        )
        assert dump_model(model) == expected


class TestFuzzLowering:
    @settings(max_examples=60, deadline=None)
    @given(programs())
    def test_checked_programs_lower_cleanly(self, program):
        from logicforge.errors import SemanticError

        try:
            checked = check(program)
        except SemanticError:
            return  # rejected inputs are out of scope here
        model = lower(checked)
        validate_model(model)
        scalar_fields = len(program.classes[0].fields)
        instances = program.classes[1].fields[0].list_len
        assert len(model.vars) == scalar_fields * instances
        n_nondet = sum(
            1
            for stmt in program.functions[0].body
            if isinstance(stmt, Assign) and type(stmt.value).__name__ == "Nondet"
        )
        assert len(model.selectors) == n_nondet
