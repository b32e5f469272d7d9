"""Native finite-domain solver: backtracking search with propagation.

Search is depth-first over explicit domains with minimum-remaining-values
variable order (ties to the lowest id) and ascending value order; selector
variables are branched only after every regular variable is fixed. This makes
outcomes and decision counts fully deterministic.

Propagation runs each constraint and all-different group to a fixpoint:

* three-valued constraint evaluation over possible-value sets detects
  contradictions and prunes, via singleton tests, both selector values whose
  implied element constraints cannot hold and values of directly referenced
  variables (bounds-and-membership filtering for comparisons and arithmetic);
* all-different groups remove assigned values from peers and apply
  Hall-interval reasoning over the value range.

Pruning only ever uses over-approximations of reachable values, so no value
belonging to a satisfying assignment is removed.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from ..errors import BudgetExceeded, InternalError
from ..model.constraints import (
    CAbs,
    CBin,
    CBool,
    CCmp,
    CElem,
    CExpr,
    CLit,
    CNot,
    CVar,
    ConstraintModel,
    domain_size,
    walk_cexpr,
)
from ..model.decode import SolutionTable, decode


@dataclass(frozen=True)
class Budget:
    max_decisions: int = 10_000_000
    max_time: float = 30.0


class Status(Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    assignment: dict[int, int] | None
    stats: SolveStats

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT


@dataclass(frozen=True)
class AmbiguityReport:
    first: dict[int, int]
    second: dict[int, int] | None

    @property
    def ambiguous(self) -> bool:
        return self.second is not None


# --- concrete evaluation -------------------------------------------------------


def eval_cexpr(expr: CExpr, values) -> int | bool:
    """Evaluate under a total assignment (list or dict indexed by id)."""
    if isinstance(expr, CLit):
        return expr.value
    if isinstance(expr, CVar):
        return values[expr.var]
    if isinstance(expr, CElem):
        return values[expr.table[values[expr.selector]]]
    if isinstance(expr, CBin):
        left = eval_cexpr(expr.left, values)
        right = eval_cexpr(expr.right, values)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        return left * right
    if isinstance(expr, CAbs):
        return abs(eval_cexpr(expr.arg, values))
    if isinstance(expr, CCmp):
        left = eval_cexpr(expr.left, values)
        right = eval_cexpr(expr.right, values)
        return _CMP[expr.op](left, right)
    if isinstance(expr, CBool):
        if expr.op == "and":
            return all(eval_cexpr(p, values) for p in expr.parts)
        return any(eval_cexpr(p, values) for p in expr.parts)
    assert isinstance(expr, CNot)
    return not eval_cexpr(expr.arg, values)


_CMP: dict[str, Callable[[int, int], bool]] = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def verify(model: ConstraintModel, assignment: dict[int, int]) -> bool:
    """Independent check that an assignment satisfies every constraint,
    every all-different group, and every domain."""
    for v in model.vars:
        if assignment.get(v.id) not in set(v.values()):
            return False
    for s in model.selectors:
        if not (0 <= assignment.get(s.id, -1) < s.list_len):
            return False
    for group in model.alldiff_groups:
        seen = [assignment[v] for v in group]
        if len(set(seen)) != len(seen):
            return False
    return all(eval_cexpr(c, assignment) for c in model.constraints)


# --- abstract evaluation -------------------------------------------------------

_SET_CAP = 512  # beyond this, collapse to a contiguous range (still sound)


def _apply_bin(op: str, ls: frozenset[int] | set[int], rs) -> set[int]:
    if len(ls) * len(rs) > _SET_CAP:
        lo_l, hi_l, lo_r, hi_r = min(ls), max(ls), min(rs), max(rs)
        if op == "+":
            return set(range(lo_l + lo_r, hi_l + hi_r + 1))
        if op == "-":
            return set(range(lo_l - hi_r, hi_l - lo_r + 1))
        corners = [a * b for a in (lo_l, hi_l) for b in (lo_r, hi_r)]
        return set(range(min(corners), max(corners) + 1))
    if op == "+":
        return {a + b for a in ls for b in rs}
    if op == "-":
        return {a - b for a in ls for b in rs}
    return {a * b for a in ls for b in rs}


def _cmp_sets(op: str, ls, rs) -> tuple[bool, bool]:
    """(can be true, can be false) for a comparison over value sets."""
    if op == "==":
        both = bool(ls & rs)
        single = len(ls) == 1 == len(rs) and ls == rs
        return both, not single
    if op == "!=":
        can_eq, can_ne = _cmp_sets("==", ls, rs)
        return can_ne, can_eq
    lo_l, hi_l, lo_r, hi_r = min(ls), max(ls), min(rs), max(rs)
    if op == "<":
        return lo_l < hi_r, hi_l >= lo_r
    if op == "<=":
        return lo_l <= hi_r, hi_l > lo_r
    if op == ">":
        return hi_l > lo_r, lo_l <= hi_r
    assert op == ">="
    return hi_l >= lo_r, lo_l < hi_r


class _State:
    """Mutable search state: one explicit domain per id (vars then selectors)."""

    __slots__ = ("doms",)

    def __init__(self, doms: list[list[int]]):
        self.doms = doms

    def copy(self) -> "_State":
        return _State([d[:] for d in self.doms])


class Contradiction(Exception):
    pass


@dataclass
class _ConstraintMeta:
    expr: CExpr
    selectors: list[tuple[int, tuple[int, ...]]]  # (selector id, var table)
    bare_vars: list[int]  # vars referenced outside elem tables
    watched: list[int]  # every id whose domain change re-triggers this


def _constraint_meta(expr: CExpr) -> _ConstraintMeta:
    selectors: dict[int, tuple[int, ...]] = {}
    bare: set[int] = set()
    watched: set[int] = set()
    for node in walk_cexpr(expr):
        if isinstance(node, CVar):
            bare.add(node.var)
            watched.add(node.var)
        elif isinstance(node, CElem):
            selectors[node.selector] = node.table
            watched.add(node.selector)
            watched.update(node.table)
    return _ConstraintMeta(
        expr, sorted(selectors.items()), sorted(bare), sorted(watched)
    )


class _Solver:
    def __init__(self, model: ConstraintModel, budget: Budget, trace=None):
        self.model = model
        self.budget = budget
        self.trace = trace
        self.stats = SolveStats()
        self.n_vars = len(model.vars)
        self.n_ids = model.n_ids
        self.meta = [_constraint_meta(c) for c in model.constraints]
        self.watchers: list[list[int]] = [[] for _ in range(self.n_ids)]
        for ci, m in enumerate(self.meta):
            for ident in m.watched:
                self.watchers[ident].append(ci)
        self.group_of: list[list[int]] = [[] for _ in range(self.n_ids)]
        for gi, group in enumerate(model.alldiff_groups):
            for v in group:
                self.group_of[v].append(gi)
        self.start = time.perf_counter()
        self.deadline = self.start + budget.max_time

    # -- domain plumbing ---------------------------------------------------

    def initial_state(self) -> _State:
        return _State([sorted(self.model.domain_of(i)) for i in range(self.n_ids)])

    def _remove(self, state: _State, ident: int, value: int, dirty: set[int]) -> None:
        dom = state.doms[ident]
        dom.remove(value)
        self.stats.propagations += 1
        if not dom:
            raise Contradiction()
        dirty.add(ident)

    # -- abstract evaluation over current domains --------------------------

    def _aset(self, expr: CExpr, doms, pin_id: int, pin_val: int) -> set[int]:
        if isinstance(expr, CLit):
            return {expr.value}
        if isinstance(expr, CVar):
            if expr.var == pin_id:
                return {pin_val}
            return set(doms[expr.var])
        if isinstance(expr, CElem):
            if expr.selector == pin_id:
                choices = (pin_val,)
            else:
                choices = doms[expr.selector]
            out: set[int] = set()
            for j in choices:
                v = expr.table[j]
                if v == pin_id:
                    out.add(pin_val)
                else:
                    out.update(doms[v])
            return out
        if isinstance(expr, CBin):
            return _apply_bin(
                expr.op,
                self._aset(expr.left, doms, pin_id, pin_val),
                self._aset(expr.right, doms, pin_id, pin_val),
            )
        assert isinstance(expr, CAbs)
        return {abs(v) for v in self._aset(expr.arg, doms, pin_id, pin_val)}

    def _abool(self, expr: CExpr, doms, pin_id: int = -1, pin_val: int = 0) -> tuple[bool, bool]:
        if isinstance(expr, CCmp):
            ls = self._aset(expr.left, doms, pin_id, pin_val)
            rs = self._aset(expr.right, doms, pin_id, pin_val)
            return _cmp_sets(expr.op, ls, rs)
        if isinstance(expr, CBool):
            if expr.op == "and":
                can_true, can_false = True, False
                for p in expr.parts:
                    t, f = self._abool(p, doms, pin_id, pin_val)
                    can_true = can_true and t
                    can_false = can_false or f
            else:
                can_true, can_false = False, True
                for p in expr.parts:
                    t, f = self._abool(p, doms, pin_id, pin_val)
                    can_true = can_true or t
                    can_false = can_false and f
            return can_true, can_false
        if isinstance(expr, CNot):
            t, f = self._abool(expr.arg, doms, pin_id, pin_val)
            return f, t
        raise InternalError(f"non-boolean constraint root: {expr!r}")

    # -- propagation --------------------------------------------------------

    def propagate(self, state: _State) -> bool:
        """Run to fixpoint. Returns False on contradiction. The fixpoint is
        unique (all propagators are monotone), so processing order only
        affects intermediate work, never the result."""
        n_groups = len(self.model.alldiff_groups)
        # work items: 0..n_groups-1 are groups, then constraints
        queued = [True] * (n_groups + len(self.meta))
        queue = deque(range(len(queued)))
        try:
            while queue:
                item = queue.popleft()
                queued[item] = False
                dirty: set[int] = set()
                if item < n_groups:
                    self._propagate_group(state, item, dirty)
                else:
                    self._propagate_constraint(state, item - n_groups, dirty)
                for ident in sorted(dirty):
                    if ident < self.n_vars:
                        for gi in self.group_of[ident]:
                            if not queued[gi]:
                                queued[gi] = True
                                queue.append(gi)
                    for ci in self.watchers[ident]:
                        if not queued[n_groups + ci]:
                            queued[n_groups + ci] = True
                            queue.append(n_groups + ci)
            return True
        except Contradiction:
            return False

    def _propagate_group(self, state: _State, gi: int, dirty: set[int]) -> None:
        group = self.model.alldiff_groups[gi]
        doms = state.doms
        # assigned values leave every peer
        for v in group:
            if len(doms[v]) == 1:
                val = doms[v][0]
                for w in group:
                    if w != v and val in doms[w]:
                        self._remove(state, w, val, dirty)
        # Hall intervals over the remaining value range
        union = sorted({val for v in group for val in doms[v]})
        if len(union) < len(group):
            raise Contradiction()
        for ai in range(len(union)):
            for bi in range(ai, len(union)):
                lo, hi = union[ai], union[bi]
                capacity = bi - ai + 1
                inside = [v for v in group if doms[v][0] >= lo and doms[v][-1] <= hi]
                if len(inside) > capacity:
                    raise Contradiction()
                if len(inside) == capacity:
                    for v in group:
                        if v in inside:
                            continue
                        for val in [x for x in doms[v] if lo <= x <= hi]:
                            self._remove(state, v, val, dirty)

    def _propagate_constraint(self, state: _State, ci: int, dirty: set[int]) -> None:
        meta = self.meta[ci]
        doms = state.doms
        can_true, _ = self._abool(meta.expr, doms)
        if not can_true:
            raise Contradiction()
        for sel, table in meta.selectors:
            if len(doms[sel]) > 1:
                for j in list(doms[sel]):
                    if not self._abool(meta.expr, doms, sel, j)[0]:
                        self._remove(state, sel, j, dirty)
        test_vars = dict.fromkeys(meta.bare_vars)
        for sel, table in meta.selectors:
            if len(doms[sel]) == 1:
                test_vars[table[doms[sel][0]]] = None
        for v in test_vars:
            if len(doms[v]) > 1:
                for a in list(doms[v]):
                    if not self._abool(meta.expr, doms, v, a)[0]:
                        self._remove(state, v, a, dirty)

    # -- search --------------------------------------------------------------

    def _pick(self, state: _State) -> int | None:
        best = None
        best_size = None
        for ident in range(self.n_vars):
            size = len(state.doms[ident])
            if size > 1 and (best_size is None or size < best_size):
                best, best_size = ident, size
        if best is not None:
            return best
        for ident in range(self.n_vars, self.n_ids):
            size = len(state.doms[ident])
            if size > 1 and (best_size is None or size < best_size):
                best, best_size = ident, size
        return best

    def _tick(self) -> None:
        self.stats.decisions += 1
        if self.stats.decisions > self.budget.max_decisions:
            raise BudgetExceeded(
                "decision budget exhausted",
                self.stats.decisions,
                time.perf_counter() - self.start,
            )
        if time.perf_counter() > self.deadline:
            raise BudgetExceeded(
                "time budget exhausted",
                self.stats.decisions,
                time.perf_counter() - self.start,
            )

    def search(self, state: _State) -> list[int] | None:
        ident = self._pick(state)
        if ident is None:
            return [d[0] for d in state.doms]
        for value in list(state.doms[ident]):
            self._tick()
            if self.trace:
                self.trace(f"decide {ident}={value}")
            child = state.copy()
            child.doms[ident] = [value]
            if self.propagate(child):
                found = self.search(child)
                if found is not None:
                    return found
            if self.trace:
                self.trace(f"backtrack {ident}={value}")
        return None

    def run(self) -> SolveOutcome:
        self.start = time.perf_counter()
        try:
            state = self.initial_state()
            if not self.propagate(state):
                solution = None
            else:
                solution = self.search(state)
        finally:
            self.stats.elapsed = time.perf_counter() - self.start
        if solution is None:
            return SolveOutcome(Status.UNSAT, None, self.stats)
        assignment = {i: solution[i] for i in range(self.n_ids)}
        if not verify(self.model, assignment):
            raise InternalError("solver returned an assignment that fails verification")
        return SolveOutcome(Status.SAT, assignment, self.stats)


def solve(model: ConstraintModel, budget: Budget | None = None, trace=None) -> SolveOutcome:
    """Find a first satisfying assignment, or prove Unsat by complete search.

    Raises BudgetExceeded when the decision or time budget runs out: the
    caller must treat that as "unknown", never as Unsat.
    """
    return _Solver(model, budget or Budget(), trace).run()


def propagate_domains(
    model: ConstraintModel, domains: dict[int, list[int]] | None = None
) -> dict[int, list[int]] | None:
    """Run propagation alone (no search) and return the pruned domains,
    or None on contradiction. Intended for tests and debugging."""
    solver = _Solver(model, Budget())
    state = solver.initial_state()
    if domains:
        for ident, dom in domains.items():
            state.doms[ident] = sorted(dom)
    if not solver.propagate(state):
        return None
    return {i: list(d) for i, d in enumerate(state.doms)}


# --- ambiguity -------------------------------------------------------------------


def _blocking_clause(var_ids, assignment: dict[int, int]) -> CExpr:
    return CBool("or", tuple(CCmp("!=", CVar(v), CLit(assignment[v])) for v in var_ids))


def find_second(
    model: ConstraintModel, first: dict[int, int], budget: Budget | None = None
) -> AmbiguityReport:
    """Search for a second assignment whose decoded table differs from the
    first one's. Selector variables never count toward distinctness, and row
    permutations of the same table are not reported as ambiguity."""
    budget = budget or Budget()
    regular = [v.id for v in model.vars]

    if model.position_pinnable():
        pinned = _pin_positions(model)
        first_table = decode(model, first)
        blocked = _block_table(pinned, first_table)
        outcome = solve(blocked, budget)
        return AmbiguityReport(first, outcome.assignment if outcome.is_sat else None)

    # General path: enumerate assignments, skipping row permutations of the
    # first table, until a genuinely different table (or exhaustion).
    first_key = decode(model, first).key()
    work = ConstraintModel(
        model.vars,
        model.selectors,
        model.alldiff_groups,
        list(model.constraints) + [_blocking_clause(regular, first)],
        model.layout,
    )
    for _ in range(10_000):
        outcome = solve(work, budget)
        if not outcome.is_sat:
            return AmbiguityReport(first, None)
        assert outcome.assignment is not None
        if decode(work, outcome.assignment).key() != first_key:
            return AmbiguityReport(first, outcome.assignment)
        work = ConstraintModel(
            work.vars,
            work.selectors,
            work.alldiff_groups,
            list(work.constraints) + [_blocking_clause(regular, outcome.assignment)],
            work.layout,
        )
    raise BudgetExceeded("too many equivalent assignments while checking ambiguity")


def _pin_positions(model: ConstraintModel) -> ConstraintModel:
    pf = model.layout.position_field
    assert pf is not None
    pins: list[CExpr] = []
    for i, row in enumerate(model.layout.rows):
        vid = row.fields[pf]
        lo = min(model.vars[vid].values())
        pins.append(CCmp("==", CVar(vid), CLit(lo + i)))
    return ConstraintModel(
        model.vars,
        model.selectors,
        model.alldiff_groups,
        list(model.constraints) + pins,
        model.layout,
    )


def _block_table(pinned: ConstraintModel, table: SolutionTable) -> ConstraintModel:
    """Forbid the canonical-row-order encoding of ``table`` in a pinned model."""
    from ..model.decode import encode

    canonical = encode(pinned, table)
    pf = pinned.layout.position_field
    lits = []
    for row in pinned.layout.rows:
        for col, vid in row.fields.items():
            if col == pf:
                continue  # pinned equal in every solution
            lits.append(CCmp("!=", CVar(vid), CLit(canonical[vid])))
    return ConstraintModel(
        pinned.vars,
        pinned.selectors,
        pinned.alldiff_groups,
        list(pinned.constraints) + [CBool("or", tuple(lits))],
        pinned.layout,
    )
