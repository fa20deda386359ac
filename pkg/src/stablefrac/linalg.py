"""Small exact-rational Gaussian elimination helpers."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Rref:
    """An incrementally maintained reduced row-echelon basis.

    Rows are added one at a time; dependent rows are rejected.  The structure
    supports extracting a null-space vector for any free column, which is what
    the vertex walk needs.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, list[Fraction]] = {}   # pivot column -> reduced row

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_columns(self) -> set[int]:
        return set(self.rows)

    def add(self, vector: Sequence[Fraction]) -> bool:
        """Reduce ``vector`` against the basis; returns False if dependent."""
        v = [Fraction(x) for x in vector]
        for p, row in self.rows.items():
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        pivot = next((c for c, a in enumerate(v) if a), None)
        if pivot is None:
            return False
        pv = v[pivot]
        v = [a / pv for a in v]
        for p, row in self.rows.items():
            if row[pivot]:
                c = row[pivot]
                self.rows[p] = [a - c * b for a, b in zip(row, v)]
        self.rows[pivot] = v
        return True

    def null_vector(self, free_col: int) -> list[Fraction]:
        """A nonzero vector orthogonal to every row, with 1 at ``free_col``."""
        if free_col in self.rows:
            raise ValueError("free_col is a pivot column")
        v = [Fraction(0)] * self.ncols
        v[free_col] = Fraction(1)
        for p, row in self.rows.items():
            v[p] = -row[free_col]
        return v


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    basis = Rref(ncols)
    for row in rows:
        basis.add(row)
    return basis.rank


def solve_exact(a_rows: Sequence[Sequence[Fraction]],
                rhs: Sequence[Fraction]) -> tuple[str, list[Fraction] | None]:
    """Solve ``A x = b`` exactly.

    Returns ("unique", x), ("none", None) for an inconsistent system, or
    ("many", None) for an underdetermined one.
    """
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    aug = [[Fraction(v) for v in row] + [Fraction(b)]
           for row, b in zip(a_rows, rhs)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n]:
            return ("none", None)
    if len(pivots) < n:
        return ("many", None)
    x = [Fraction(0)] * n
    for row_i, c in enumerate(pivots):
        x[c] = aug[row_i][n]
    return ("unique", x)
