from __future__ import annotations

import csv
import io
from enum import StrEnum

from morseig.polyalg.fields import Field
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.morse_poly import nonsmooth_contribution


class TableFormat(StrEnum):
    md = "md"
    csv = "csv"


def contribution_rows(max_nu: int, f: Field) -> list[list[IntPoly]]:
    """Row `nu-1` holds the contributions for relative indices `i = 1..nu`."""
    if max_nu < 1:
        raise ValueError(f"max_nu must be positive: {max_nu}")
    return [
        [nonsmooth_contribution(nu, i, f) for i in range(1, nu + 1)]
        for nu in range(1, max_nu + 1)
    ]


def emit_table(max_nu: int, f: Field, fmt: TableFormat = TableFormat.md) -> str:
    """
    Table of non-smooth contributions, one row per multiplicity `nu`, one column per
    relative index `i`. Cells past the diagonal are left blank.
    """
    rows = contribution_rows(max_nu, f)
    header = ["nu \\ i"] + [str(i) for i in range(1, max_nu + 1)]
    body = [
        [str(nu)] + [p.to_str() for p in row] + [""] * (max_nu - nu)
        for nu, row in enumerate(rows, start=1)
    ]
    if fmt is TableFormat.csv:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["nu"] + header[1:])
        writer.writerows(body)
        return out.getvalue()

    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
    ]
    lines += ["| " + " | ".join(cells) + " |" for cells in body]
    return "\n".join(lines) + "\n"


## Tests


def test_small_table():
    rows = contribution_rows(2, Field.real)
    assert [[p.to_str() for p in row] for row in rows] == [["1"], ["1", "t^2"]]
    text = emit_table(2, Field.real)
    assert "| 2 | 1 | t^2 |" in text
    assert emit_table(2, Field.real, TableFormat.csv).splitlines()[2] == "2,1,t^2"
