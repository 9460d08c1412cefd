"""Small exact linear algebra over the rationals (lists of Fraction rows)."""

from __future__ import annotations

from fractions import Fraction

Vector = list  # list[Fraction]
Matrix = list  # list[list[Fraction]]


def rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    m = [list(map(Fraction, row)) for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        lead = m[r][c]
        m[r] = [v / lead for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat: Matrix) -> int:
    return len(rref(mat)[1])


def nullspace(mat: Matrix) -> list[Vector]:
    """Basis of the right nullspace."""
    if not mat:
        return []
    cols = len(mat[0])
    red, pivots = rref(mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve(mat: Matrix, rhs: Vector) -> Vector | None:
    """One solution of mat @ x = rhs, or None if inconsistent."""
    if not mat:
        return [] if all(v == 0 for v in rhs) else None
    cols = len(mat[0])
    aug = [list(row) + [r] for row, r in zip(mat, rhs)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


class IncrementalSpan:
    """Row space maintained in echelon form; O(dim^2) per insertion."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []   # echelon rows, unit pivots
        self.pivots: list[int] = []

    def reduce(self, vec: Vector) -> Vector:
        v = list(map(Fraction, vec))
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                factor = v[p]
                v = [a - factor * b for a, b in zip(v, row)]
        return v

    def add(self, vec: Vector) -> bool:
        """Insert vec; True if it enlarged the span."""
        v = self.reduce(vec)
        p = next((i for i, a in enumerate(v) if a != 0), None)
        if p is None:
            return False
        lead = v[p]
        v = [a / lead for a in v]
        for row in self.rows:
            if row[p] != 0:
                f = row[p]
                row[:] = [a - f * b for a, b in zip(row, v)]
        self.rows.append(v)
        self.pivots.append(p)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def coordinates(self, vec: Vector) -> Vector | None:
        """Coefficients of vec in terms of the *inserted* rows are not kept;
        this returns None unless vec is in the span (membership test)."""
        v = self.reduce(vec)
        return None if any(a != 0 for a in v) else v


def primitive(vec: Vector) -> Vector:
    """Scale a rational vector to coprime integers with positive leading sign."""
    from math import gcd, lcm

    nz = [v for v in vec if v != 0]
    if not nz:
        return list(vec)
    denom = lcm(*(v.denominator for v in nz)) if len(nz) > 1 else nz[0].denominator
    ints = [v * denom for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, int(v))
    out = [Fraction(int(v), g) for v in ints]
    if next(v for v in out if v != 0) < 0:
        out = [-v for v in out]
    return out
