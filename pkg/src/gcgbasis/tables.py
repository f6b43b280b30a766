"""Dimension-table generation (the appendix-style GE / GE-PI tables)."""

from __future__ import annotations

from .dims import dim_ge, dim_gepi
from .indexing import LVector


def table_per_ell(ell: int, n_max: int) -> dict[int, dict[int, tuple[int, int]]]:
    """Rows L -> {N -> (gepi, ge)} for identical-ell vectors of length N.

    Cells with L > N*ell are omitted (blank in the rendered table).
    """
    out: dict[int, dict[int, tuple[int, int]]] = {}
    for L in range(0, ell * n_max + 1):
        row = {}
        for n in range(1, n_max + 1):
            if L > ell * n:
                continue
            lv = LVector.of([ell] * n)
            row[n] = (dim_gepi(lv, L), dim_ge(lv, L))
        out[L] = row
    return out


def table_per_n(n: int, l_max: int) -> dict[int, dict[int, tuple[int, int]]]:
    """Rows L -> {ell -> (gepi, ge)} for fixed length n, ell = 0 .. l_max."""
    out: dict[int, dict[int, tuple[int, int]]] = {}
    for L in range(0, l_max * n + 1):
        row = {}
        for ell in range(0, l_max + 1):
            if L > ell * n:
                continue
            lv = LVector.of([ell] * n)
            row[ell] = (dim_gepi(lv, L), dim_ge(lv, L))
        out[L] = row
    return out


def render_csv(table: dict, col_label: str, cols: list[int]) -> str:
    lines = ["L," + ",".join(f"{col_label}={c} GE-PI,{col_label}={c} GE" for c in cols)]
    for L in sorted(table):
        cells = []
        for c in cols:
            pair = table[L].get(c)
            cells.extend(["", ""] if pair is None else [str(pair[0]), str(pair[1])])
        lines.append(f"{L}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def render_markdown(table: dict, col_label: str, cols: list[int]) -> str:
    head = "| L | " + " | ".join(f"{col_label}={c} (GE-PI, GE)" for c in cols) + " |"
    sep = "|" + "---|" * (len(cols) + 1)
    lines = [head, sep]
    for L in sorted(table):
        cells = []
        for c in cols:
            pair = table[L].get(c)
            cells.append("" if pair is None else f"{pair[0]}, {pair[1]}")
        lines.append(f"| {L} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def appendix_tables(
    l_values: list[int], n_max: int, n_fixed: list[int], l_max: int
) -> list[tuple[str, str, dict, list[int]]]:
    """All appendix-style tables: (title, col_label, table, columns)."""
    out = []
    for ell in l_values:
        out.append(
            (
                f"identical l = {ell}, N = 1..{n_max}",
                "N",
                table_per_ell(ell, n_max),
                list(range(1, n_max + 1)),
            )
        )
    for n in n_fixed:
        out.append(
            (
                f"fixed N = {n}, l = 0..{l_max}",
                "l",
                table_per_n(n, l_max),
                list(range(0, l_max + 1)),
            )
        )
    return out
