"""Solver: propagation behaviour, search outcomes, ambiguity, brute force."""

import dataclasses

import pytest
from hypothesis import given, settings

from logicforge.errors import BudgetExceeded, CapExceeded, SemanticError
from logicforge.frontend import check
from logicforge.frontend.ast import IntRange
from logicforge.model import decode, lower, validate_model
from logicforge.model.constraints import (
    CCmp,
    CVar,
    ConstraintModel,
    InstanceLayout,
    RowLayout,
    Var,
)
from logicforge.solver import (
    Budget,
    Status,
    brute_force,
    find_second,
    propagate_domains,
    solve,
    verify,
)

from conftest import compile_source
from strategies import programs

TAUTOLOGY = '    anyone = nondet(s.items)\n    assume(anyone.f == anyone.f)\n'


def flat_model(domains: list[tuple[int, int]], groups=(), constraints=()) -> ConstraintModel:
    """Hand-built model: one instance, one int field per var, [lo, hi) domains."""
    vars_ = [Var(i, f"f{i}", IntRange(lo, hi)) for i, (lo, hi) in enumerate(domains)]
    layout = InstanceLayout(
        (RowLayout(0, "C", {f"f{i}": i for i in range(len(vars_))}),),
        tuple(f"f{i}" for i in range(len(vars_))),
        None,
    )
    model = ConstraintModel(vars_, [], [tuple(g) for g in groups], list(constraints), layout)
    validate_model(model)
    return model


class TestPropagate:
    def test_alldiff_removes_assigned_value_from_peers(self):
        model = flat_model([(1, 4)] * 3, groups=[(0, 1, 2)])
        doms = propagate_domains(model, {0: [1]})
        assert doms[0] == [1]
        assert doms[1] == [2, 3]
        assert doms[2] == [2, 3]

    def test_bounds_consistency_on_less_than(self):
        # a < b with a in 3..6, b in 1..4 pins a=3, b=4
        model = flat_model(
            [(3, 7), (1, 5)], constraints=[CCmp("<", CVar(0), CVar(1))]
        )
        doms = propagate_domains(model)
        assert doms[0] == [3]
        assert doms[1] == [4]

    def test_selector_fixed_when_one_instance_remains(self):
        # three houses; only house 1 can still be "Bob", so the selector and
        # consequently Bob's phone follow by propagation alone
        _, model = compile_source(
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
        # name vars are 0, 2, 4; exclude Bob (code 1) from houses 0 and 2
        doms = propagate_domains(model, {0: [0, 2], 4: [0, 2]})
        sel = model.selectors[0].id
        assert doms[sel] == [1]
        assert doms[2] == [1]  # house 1 must be Bob
        assert doms[3] == [1]  # and hold the xiaomi (code 1)

        # propagation on the unrestricted model is sound against enumeration:
        # every value reachable in some solution survives propagation
        solutions = brute_force(model)
        full = propagate_domains(model)
        for v in model.vars:
            reachable = {s[v.id] for s in solutions}
            assert reachable <= set(full[v.id])

    def test_contradiction_is_reported_not_raised(self):
        model = flat_model(
            [(1, 3)],
            constraints=[
                CCmp("==", CVar(0), _lit(1)),
                CCmp("==", CVar(0), _lit(2)),
            ],
        )
        assert propagate_domains(model) is None


def _lit(value: int):
    from logicforge.model.constraints import CLit

    return CLit(value)


class TestSolve:
    def test_worked_example_solves_to_expected_table(self, zebra_model):
        outcome = solve(zebra_model)
        assert outcome.is_sat
        table = decode(zebra_model, outcome.assignment)
        assert [r["name"] for r in table.rows] == ["Alice", "Peter", "Eric", "Arnold"]
        assert verify(zebra_model, outcome.assignment)

    def test_direct_contradiction_is_unsat(self):
        model = flat_model(
            [(1, 3)],
            constraints=[CCmp("==", CVar(0), _lit(1)), CCmp("==", CVar(0), _lit(2))],
        )
        assert solve(model).status is Status.UNSAT

    def test_pigeonhole_is_unsat(self):
        model = flat_model([(0, 2)] * 3, groups=[(0, 1, 2)])
        assert solve(model).status is Status.UNSAT

    def test_assignment_includes_selector_values(self):
        src = (
            'class E:\n    f: Domain[str, "p", "q"]\n'
            "class S:\n    items: list[E, 2]\n"
            "def v(s: S) -> None:\n"
            "    a = nondet(s.items)\n"
            '    assume(a.f == "q")\n'
        )
        _, model = compile_source(src)
        outcome = solve(model)
        assert outcome.is_sat
        sel = model.selectors[0]
        assert sel.id in outcome.assignment
        chosen = outcome.assignment[sel.id]
        # the chosen instance really holds "q" (code 1)
        field_var = model.layout.rows[chosen].fields["f"]
        assert outcome.assignment[field_var] == 1

    def test_determinism(self, zebra_model):
        a, b = solve(zebra_model), solve(zebra_model)
        assert a.assignment == b.assignment
        assert a.stats.decisions == b.stats.decisions

    def test_budget_exceeded_is_distinct_from_unsat(self):
        src = (
            "class E:\n    f: Unique[Domain[int, range(0, 6)]]\n"
            "class S:\n    items: list[E, 6]\n"
            "def v(s: S) -> None:\n" + TAUTOLOGY
        )
        _, model = compile_source(src)
        with pytest.raises(BudgetExceeded):
            solve(model, Budget(max_decisions=1))

    def test_time_budget(self):
        src = (
            "class E:\n    f: Unique[Domain[int, range(0, 6)]]\n"
            "    g: Unique[Domain[int, range(0, 6)]]\n"
            "class S:\n    items: list[E, 6]\n"
            "def v(s: S) -> None:\n"
            "    a = nondet(s.items)\n"
            "    b = nondet(s.items)\n"
            "    assume(a.f * b.g - a.g * b.f == 17)\n"
        )
        _, model = compile_source(src)
        with pytest.raises(BudgetExceeded):
            solve(model, Budget(max_time=0.0))


class TestFindSecond:
    def test_worked_example_is_unique(self, zebra_model):
        outcome = solve(zebra_model)
        report = find_second(zebra_model, outcome.assignment)
        assert not report.ambiguous

    def test_underconstrained_two_var_model(self):
        model = flat_model([(1, 3), (1, 3)])
        outcome = solve(model)
        report = find_second(model, outcome.assignment)
        assert report.ambiguous
        assert verify(model, report.second)
        assert decode(model, report.second) != decode(model, report.first)

    def test_row_permutations_do_not_count_as_ambiguity(self):
        # positions + one unique feature, fully constrained by clue symmetry:
        # the only freedom is which slot stores which house
        src = (
            "class E:\n"
            "    p: Unique[Domain[int, range(1, 3)]]\n"
            '    n: Unique[Domain[str, "a", "b"]]\n'
            "class S:\n    items: list[E, 2]\n"
            "def v(s: S) -> None:\n"
            "    x = nondet(s.items)\n"
            '    assume(x.n == "a")\n'
            "    assert x.p == 1\n"
        )
        _, model = compile_source(src)
        outcome = solve(model)
        report = find_second(model, outcome.assignment)
        assert not report.ambiguous

    def test_removing_a_clue_matches_brute_force(self, zebra_instance):
        from logicforge.bench.render import render_dsl
        from logicforge.frontend import parse

        for drop in (2, 7):  # clue indices to remove (0-based)
            clues = tuple(c for i, c in enumerate(zebra_instance.clues) if i != drop)
            weakened = dataclasses.replace(zebra_instance, clues=clues)
            model = lower(check(parse(render_dsl(weakened))))
            outcome = solve(model)
            assert outcome.is_sat
            tables = {decode(model, a).key() for a in brute_force(model)}
            report = find_second(model, outcome.assignment)
            assert report.ambiguous == (len(tables) >= 2)
            if report.ambiguous:
                assert verify(model, report.second)


class TestBruteForce:
    def test_worked_example_unique_table(self, zebra_model):
        solutions = brute_force(zebra_model)
        assert len(solutions) == 1
        table = decode(zebra_model, solutions[0])
        assert table == decode(zebra_model, solve(zebra_model).assignment)

    def test_two_instance_permutations(self):
        src = (
            'class E:\n    s: Unique[Domain[str, "a", "b"]]\n'
            "class S:\n    items: list[E, 2]\n"
            "def v(s: S) -> None:\n"
            "    x = nondet(s.items)\n"
            '    assume(x.s == "a" or x.s != "a")\n'
        )
        _, model = compile_source(src)
        assert len(brute_force(model)) == 2

    def test_pigeonhole_empty(self):
        model = flat_model([(0, 2)] * 3, groups=[(0, 1, 2)])
        assert brute_force(model) == []

    def test_cap_exceeded(self):
        model = flat_model([(0, 100)] * 4)
        with pytest.raises(CapExceeded):
            brute_force(model, cap=1_000_000)


class TestOracleAgreement:
    """solve / find_second / brute_force agree on random small programs."""

    @settings(max_examples=60, deadline=None)
    @given(programs(max_entities=3, max_fields=3, max_domain=4))
    def test_agreement(self, program):
        try:
            checked = check(program)
        except SemanticError:
            return
        model = lower(checked)
        try:
            solutions = brute_force(model, cap=200_000)
        except CapExceeded:
            return
        tables = {decode(model, a).key() for a in solutions}
        try:
            outcome = solve(model, Budget(max_decisions=200_000, max_time=10.0))
        except BudgetExceeded:
            pytest.fail("solver exceeded budget on a desk-scale model")
        if outcome.status is Status.UNSAT:
            assert not tables
            return
        assert tables, "solver found a solution brute force missed"
        assert verify(model, outcome.assignment)
        assert decode(model, outcome.assignment).key() in tables
        report = find_second(model, outcome.assignment)
        assert report.ambiguous == (len(tables) >= 2)

    @settings(max_examples=40, deadline=None)
    @given(programs(max_entities=3, max_fields=2, max_domain=3))
    def test_propagation_never_removes_solution_values(self, program):
        try:
            checked = check(program)
        except SemanticError:
            return
        model = lower(checked)
        try:
            solutions = brute_force(model, cap=100_000)
        except CapExceeded:
            return
        doms = propagate_domains(model)
        if doms is None:
            assert not solutions
            return
        for v in model.vars:
            reachable = {s[v.id] for s in solutions}
            assert reachable <= set(doms[v.id])
