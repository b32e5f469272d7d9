"""Check a candidate solution table directly against a program's validator.

This is deliberately independent of the constraint model and solver: the
candidate's values are plugged into the statements one at a time, and nondet
choices are enumerated depth-first over the product of list lengths. A table
passes when some choice of selectors satisfies every assume and assert, and
every Unique field holds pairwise-distinct in-domain values.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ShapeError
from ..frontend.ast import (
    Abs,
    Assign,
    Binary,
    BoolOp,
    ClassDecl,
    Compare,
    EnumValues,
    Expr,
    FieldAccess,
    Index,
    IntLit,
    IntRange,
    LocalRef,
    Nondet,
    Not,
    StrLit,
)
from ..frontend.check import CheckedProgram
from ..model.decode import SolutionTable


@dataclass(frozen=True)
class _Row:
    cells: dict[str, int | str]


@dataclass(frozen=True)
class _RowList:
    rows: tuple[_Row, ...]


def check_solution(program: CheckedProgram, candidate: SolutionTable) -> bool:
    """True iff the candidate table satisfies the program's validator under
    some assignment of the nondet selectors. Raises ShapeError when the table
    does not even match the result class."""
    root = program.param_class
    rows, row_cls = _bind_rows(program, root, candidate)

    for f in row_cls.fields:
        values = [row.cells[f.name] for row in rows]
        if not all(_in_domain(v, f) for v in values):
            return False
        if f.unique and len(set(values)) != len(values):
            return False

    entry = program.entry
    if len(rows) == 1 and not any(f.list_len is not None for f in root.fields):
        root_value: object = rows[0]
    else:
        root_value = _root_with_list(root, rows)

    env: dict[str, object] = {entry.param_name: root_value}
    return _run_stmts(list(entry.body), env)


def _bind_rows(
    program: CheckedProgram, root: ClassDecl, candidate: SolutionTable
) -> tuple[tuple[_Row, ...], ClassDecl]:
    list_fields = [f for f in root.fields if f.list_len is not None]
    if list_fields:
        row_cls = program.classes[list_fields[0].base]
        expected_rows = list_fields[0].list_len
    else:
        row_cls = root
        expected_rows = 1
    columns = tuple(f.name for f in row_cls.fields)
    if set(candidate.columns) != set(columns):
        raise ShapeError(
            f"table columns {candidate.columns} do not match fields {columns}"
        )
    if len(candidate.rows) != expected_rows:
        raise ShapeError(
            f"table has {len(candidate.rows)} rows, expected {expected_rows}"
        )
    rows = tuple(_Row(dict(r)) for r in candidate.rows)
    return rows, row_cls


def _root_with_list(root: ClassDecl, rows: tuple[_Row, ...]) -> _Row:
    container = _Row({})
    for f in root.fields:
        if f.list_len is not None:
            container.cells[f.name] = _RowList(rows)
    return container


def _in_domain(value: int | str, f) -> bool:
    if isinstance(f.domain, IntRange):
        return isinstance(value, int) and f.domain.lo <= value < f.domain.hi
    if isinstance(f.domain, EnumValues):
        return value in f.domain.values
    return False


def _run_stmts(stmts: list, env: dict[str, object]) -> bool:
    """Depth-first over nondet choices; True when all statements pass."""
    import itertools

    from ..frontend.ast import walk

    for i, stmt in enumerate(stmts):
        expr = stmt.value if isinstance(stmt, Assign) else stmt.expr
        sites = [node for node in walk(expr) if isinstance(node, Nondet)]
        if sites:
            # nondet arguments never contain nondet themselves (list element
            # classes hold only scalars), so the sites are independent
            lists = []
            for site in sites:
                lst = _eval(site.arg, env, {})
                assert isinstance(lst, _RowList)
                lists.append(lst)
            for combo in itertools.product(*(range(len(l.rows)) for l in lists)):
                picks = {id(site): lst.rows[c] for site, lst, c in zip(sites, lists, combo)}
                value = _eval(expr, env, picks)
                trial_env = dict(env)
                if isinstance(stmt, Assign):
                    trial_env[stmt.target] = value
                elif not value:
                    continue
                if _run_stmts(stmts[i + 1 :], trial_env):
                    return True
            return False
        value = _eval(expr, env, {})
        if isinstance(stmt, Assign):
            env[stmt.target] = value
        elif not value:
            return False
    return True


def _eval(expr: Expr, env: dict[str, object], picks: dict[int, _Row]):
    """Concrete evaluation; ``picks`` maps nondet node ids to chosen rows."""

    def go(e: Expr):
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, StrLit):
            return e.value
        if isinstance(e, LocalRef):
            return env[e.name]
        if isinstance(e, FieldAccess):
            obj = go(e.obj)
            assert isinstance(obj, _Row)
            return obj.cells[e.field]
        if isinstance(e, Index):
            lst = go(e.obj)
            assert isinstance(lst, _RowList)
            return lst.rows[e.index]
        if isinstance(e, Nondet):
            return picks[id(e)]
        if isinstance(e, Abs):
            return abs(go(e.arg))
        if isinstance(e, Binary):
            left, right = go(e.left), go(e.right)
            if e.op == "+":
                return left + right
            if e.op == "-":
                return left - right
            return left * right
        if isinstance(e, Compare):
            left, right = go(e.left), go(e.right)
            if e.op == "==":
                return left == right
            if e.op == "!=":
                return left != right
            if e.op == "<":
                return left < right
            if e.op == "<=":
                return left <= right
            if e.op == ">":
                return left > right
            return left >= right
        if isinstance(e, BoolOp):
            if e.op == "and":
                return all(go(p) for p in e.operands)
            return any(go(p) for p in e.operands)
        assert isinstance(e, Not)
        return not go(e.operand)

    return go(expr)
