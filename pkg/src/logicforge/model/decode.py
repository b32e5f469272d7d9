"""Turn solver assignments into solution tables and back.

Rows are ordered by the single unique integer field when the result class has
one (the position field), otherwise by instance index. Cells are keyed by
(position value, column) so that two assignments that permute instances but
describe the same table compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DecodeError
from .constraints import ConstraintModel

Cell = int | str


@dataclass(frozen=True)
class SolutionTable:
    columns: tuple[str, ...]
    rows: tuple[dict[str, Cell], ...]
    position_field: str | None = None

    def row_key(self, index: int) -> Cell:
        if self.position_field is not None:
            return self.rows[index][self.position_field]
        return index

    def cells(self) -> dict[tuple[Cell, str], Cell]:
        """Cell map keyed by (row key, column), excluding the position column."""
        out: dict[tuple[Cell, str], Cell] = {}
        for i, row in enumerate(self.rows):
            key = self.row_key(i)
            for col in self.columns:
                if col != self.position_field:
                    out[(key, col)] = row[col]
        return out

    def key(self) -> tuple:
        """Canonical hashable identity, independent of row storage order."""
        return (
            self.columns,
            self.position_field,
            tuple(
                tuple(row[c] for c in self.columns)
                for row in sorted(self.rows, key=self._sort_key)
            ),
        )

    def _sort_key(self, row: dict[str, Cell]):
        if self.position_field is not None:
            return row[self.position_field]
        return 0  # storage order already meaningful

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SolutionTable):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_json_dict(self) -> dict:
        d = {"columns": list(self.columns), "rows": [dict(r) for r in self.rows]}
        if self.position_field is not None:
            d["position_field"] = self.position_field
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "SolutionTable":
        return SolutionTable(
            tuple(d["columns"]),
            tuple(dict(r) for r in d["rows"]),
            d.get("position_field"),
        )


def decode(model: ConstraintModel, assignment: dict[int, int]) -> SolutionTable:
    """Decode a total assignment over model.vars into a SolutionTable."""
    layout = model.layout
    rows = []
    for row in layout.rows:
        cells: dict[str, Cell] = {}
        for col in layout.columns:
            vid = row.fields[col]
            if vid not in assignment:
                raise DecodeError(f"assignment is missing var {vid} ({model.vars[vid].name})")
            cells[col] = model.vars[vid].render(assignment[vid])
        rows.append(cells)
    if layout.position_field is not None:
        rows.sort(key=lambda r: r[layout.position_field])
    return SolutionTable(layout.columns, tuple(rows), layout.position_field)


def encode(model: ConstraintModel, table: SolutionTable) -> dict[int, int]:
    """Invert decode for canonical assignments: table row k maps onto
    instance slot k. decode(model, encode(model, t)) == t for any valid t."""
    layout = model.layout
    if table.columns != layout.columns or len(table.rows) != len(layout.rows):
        raise DecodeError("table shape does not match the model layout")
    rows = sorted(table.rows, key=table._sort_key) if table.position_field else list(table.rows)
    assignment: dict[int, int] = {}
    for slot, row in enumerate(rows):
        for col in layout.columns:
            vid = layout.rows[slot].fields[col]
            domain = model.vars[vid].domain
            value = row[col]
            if isinstance(value, str):
                from ..frontend.ast import EnumValues

                if not isinstance(domain, EnumValues) or value not in domain.values:
                    raise DecodeError(f"value {value!r} not in domain of {model.vars[vid].name}")
                assignment[vid] = domain.values.index(value)
            else:
                assignment[vid] = int(value)
    return assignment
