"""Delimited raw tables with a missing-value marker."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from typing import Sequence, TextIO

from ..exceptions import DataError, ParseError

logger = logging.getLogger(__name__)

MISSING = "?"


@dataclass(frozen=True)
class RawTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    missing: str = MISSING
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        try:
            i = self.columns.index(name)
        except ValueError:
            raise DataError(f"table has no column {name!r}") from None
        return [row[i] for row in self.rows]


def load_table(source: TextIO, header: bool | Sequence[str] = True, delimiter: str = ",",
               missing: str = MISSING) -> RawTable:
    """Parse delimited text.

    ``header`` is ``True`` when the first line names the columns, or a
    sequence of names for headerless input.  Blank lines are skipped and
    cells are stripped of surrounding whitespace.
    """
    reader = csv.reader(source, delimiter=delimiter)
    columns = None if header is True else tuple(header) if header else None
    rows = []
    for lineno, raw in enumerate(reader, start=1):
        cells = tuple(c.strip() for c in raw)
        if not cells or all(c == "" for c in cells):
            continue
        if columns is None:
            if header is True:
                columns = cells
                continue
            columns = tuple(f"c{i}" for i in range(len(cells)))
        if len(cells) != len(columns):
            raise ParseError(f"expected {len(columns)} cells, got {len(cells)}", line=lineno)
        rows.append(cells)
    if columns is None:
        raise ParseError("no header line found", line=1)
    return RawTable(columns, tuple(rows), missing)


def drop_incomplete(table: RawTable, columns: Sequence[str] | None = None) -> RawTable:
    """Remove rows with the missing marker in any of ``columns`` (default: all)."""
    used = [table.columns.index(c) for c in columns] if columns else range(len(table.columns))
    kept = tuple(r for r in table.rows if all(r[i] != table.missing and r[i] != "" for i in used))
    dropped = len(table.rows) - len(kept)
    logger.info("kept %d rows, dropped %d incomplete", len(kept), dropped)
    return replace(table, rows=kept, dropped=table.dropped + dropped)
