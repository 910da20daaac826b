"""Tabular data: filtering, grouping, aggregation, sorting and paging.

One root (default name `table`) bound to a loaded table.  Every member
returns a table-typed value; groupBy yields a grouped table that holds
its pending aggregations (sum, countDistinct) and materialises back into
rows the moment a row-level member touches it or it has to be displayed.
Aggregating a plain table treats the whole table as one group and yields
a single-row table.

Rows keep their file order; sorts are stable and groups appear in first
occurrence order, so every operation is deterministic.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Mapping, Optional, Tuple

from ..objects import (ApplyFn, GroupedData, Obj, TableData, bottom,
                       is_bottom)
from ..typecheck import (ErrorType, MemberSig, NUM, ObjType, TEXT, Type,
                         TypedLibrary)

TABLE = ObjType("table")
TABLE.members.update({
    "filterEq": MemberSig((TEXT, TEXT), TABLE),
    "groupBy": MemberSig((TEXT,), TABLE),
    "countDistinct": MemberSig((TEXT,), TABLE),
    "sum": MemberSig((TEXT,), TABLE),
    "sortByDesc": MemberSig((TEXT,), TABLE),
    "take": MemberSig((NUM,), TABLE),
    "skip": MemberSig((NUM,), TABLE),
})


def _convert_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_csv(path) -> TableData:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return TableData((), ())
        rows = tuple(tuple(_convert_cell(c) for c in row) for row in reader)
    return TableData(tuple(header), rows)


def default_table() -> TableData:
    return load_csv(Path(__file__).resolve().parent / "fixtures" / "medals.csv")


def _cell_text(cell) -> str:
    return str(cell)


def _column_values(table: TableData, column: str) -> List:
    idx = table.columns.index(column)
    return [row[idx] for row in table.rows]


def _is_numeric(cell) -> bool:
    return isinstance(cell, (int, float)) and not isinstance(cell, bool)


def _aggregate(values: List, op: str):
    if op == "sum":
        total = sum(values)
        return total
    return len(set(values))


def materialize(grouped: GroupedData) -> TableData:
    """Rows for a grouped table: one per distinct key in first-occurrence
    order, one column per aggregation after the key column."""

    table = grouped.table
    keys = _column_values(table, grouped.key)
    order: List = []
    buckets = {}
    for key, row in zip(keys, table.rows):
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(row)
    columns = (grouped.key,) + tuple(f"{op} {col}" for op, col in grouped.aggs)
    out_rows = []
    for key in order:
        cells = [key]
        for op, col in grouped.aggs:
            idx = table.columns.index(col)
            cells.append(_aggregate([r[idx] for r in buckets[key]], op))
        out_rows.append(tuple(cells))
    return TableData(columns, tuple(out_rows))


def _whole(value, minimum: Optional[int] = None) -> Optional[int]:
    if not (isinstance(value, Obj) and value.tag == "num"):
        return None
    n = value.payload
    if isinstance(n, float):
        if not n.is_integer():
            return None
        n = int(n)
    if minimum is not None and n < minimum:
        return None
    return n


class TableLib(TypedLibrary):
    def __init__(self, table: Optional[TableData] = None,
                 root_name: str = "table"):
        self.table = table if table is not None else default_table()
        self.root_name = root_name

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        return {self.root_name: Obj("table", self.table)}

    @property
    def root_types(self) -> Mapping[str, Type]:
        return {self.root_name: TABLE}

    def owns(self, receiver: Obj) -> bool:
        return isinstance(receiver, Obj) and receiver.tag in ("table", "grouped")

    def type_of(self, obj: Obj) -> Optional[Type]:
        if is_bottom(obj):
            return ErrorType(obj.payload or "failed computation")
        if obj.tag in ("table", "grouped"):
            return TABLE
        return None

    def eval_member(self, receiver: Obj, member: str, args, apply: ApplyFn) -> Obj:
        if not isinstance(receiver, Obj):  # a bare closure value
            return bottom(f"a function has no member {member!r}")
        if is_bottom(receiver):
            return receiver
        for a in args:
            if isinstance(a, Obj) and is_bottom(a):
                return a

        if receiver.tag == "grouped":
            grouped: GroupedData = receiver.payload
            if member in ("sum", "countDistinct"):
                column = self._column_arg(grouped.table, member, args)
                if isinstance(column, Obj):
                    return column
                if member == "sum" and not self._numeric_column(grouped.table,
                                                                column):
                    return bottom(f"sum: column {column!r} is not numeric")
                return Obj("grouped", GroupedData(grouped.table, grouped.key,
                                                  grouped.aggs + ((member, column),)))
            # row-level members act on the materialised rows
            receiver = Obj("table", materialize(grouped))
        if receiver.tag != "table":
            return bottom(f"{receiver.tag} has no member {member!r}")

        table: TableData = receiver.payload
        if member == "filterEq":
            return self._filter_eq(table, args)
        if member == "groupBy":
            column = self._column_arg(table, member, args)
            if isinstance(column, Obj):
                return column
            return Obj("grouped", GroupedData(table, column, ()))
        if member == "countDistinct":
            column = self._column_arg(table, member, args)
            if isinstance(column, Obj):
                return column
            n = _aggregate(_column_values(table, column), "countDistinct")
            return Obj("table", TableData((f"countDistinct {column}",), ((n,),)))
        if member == "sum":
            column = self._column_arg(table, member, args)
            if isinstance(column, Obj):
                return column
            if not self._numeric_column(table, column):
                return bottom(f"sum: column {column!r} is not numeric")
            total = _aggregate(_column_values(table, column), "sum")
            return Obj("table", TableData((f"sum {column}",), ((total,),)))
        if member == "sortByDesc":
            column = self._column_arg(table, member, args)
            if isinstance(column, Obj):
                return column
            return Obj("table", self._sort_desc(table, column))
        if member in ("take", "skip"):
            if len(args) != 1:
                return bottom(f"{member} expects one number")
            n = _whole(args[0], minimum=0)
            if n is None:
                return bottom(f"{member} expects a whole number of rows")
            rows = table.rows[n:] if member == "skip" else table.rows[:n]
            return Obj("table", TableData(table.columns, rows))
        return bottom(f"a table has no member {member!r}")

    def _column_arg(self, table: TableData, member: str, args):
        """The column named by a single text argument; a bottom Obj when
        the argument is malformed or the column is missing."""

        if len(args) != 1 or not (isinstance(args[0], Obj)
                                  and args[0].tag == "str"):
            return bottom(f"{member} expects a column name")
        column = args[0].payload
        if column not in table.columns:
            return bottom(f"unknown column: {column}")
        return column

    def _numeric_column(self, table: TableData, column: str) -> bool:
        return all(_is_numeric(c) for c in _column_values(table, column))

    def _filter_eq(self, table: TableData, args) -> Obj:
        if len(args) != 2 or not all(isinstance(a, Obj) and a.tag == "str"
                                     for a in args):
            return bottom("filterEq expects a column name and a text value")
        column, wanted = args[0].payload, args[1].payload
        if column not in table.columns:
            return bottom(f"unknown column: {column}")
        idx = table.columns.index(column)
        rows = tuple(r for r in table.rows if _cell_text(r[idx]) == wanted)
        return Obj("table", TableData(table.columns, rows))

    def _sort_desc(self, table: TableData, column: str) -> TableData:
        idx = table.columns.index(column)
        cells = [r[idx] for r in table.rows]
        if all(_is_numeric(c) for c in cells):
            key = lambda row: row[idx]
        else:
            key = lambda row: _cell_text(row[idx])
        return TableData(table.columns,
                         tuple(sorted(table.rows, key=key, reverse=True)))
