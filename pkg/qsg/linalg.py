# linalg.py
# Exact dense linear algebra. Entries may be Scalar or ExtScalar: only
# ring operations, division and comparison with 0 are used.

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from qsg.errors import InputError
from qsg.field import ONE, ZERO

Matrix = List[List[object]]


def _nz(x) -> bool:
    return not (x == 0)


def copy_matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    return [list(r) for r in rows]


def transpose(rows: Sequence[Sequence[object]], ncols: Optional[int] = None) -> Matrix:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a: Sequence[Sequence[object]], b: Sequence[Sequence[object]]) -> Matrix:
    if a and len(a[0]) != len(b):
        raise InputError(f"shape mismatch: {len(a)}x{len(a[0])} times {len(b)}x?")
    bt = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = ZERO
            for x, y in zip(row, col):
                if _nz(x) and _nz(y):
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def rref(rows: Sequence[Sequence[object]], ncols: Optional[int] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = copy_matrix(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        p = next((i for i in range(r, len(m)) if _nz(m[i][c])), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv if _nz(x) else ZERO for x in m[r]]
        for i in range(len(m)):
            if i != r and _nz(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y if _nz(y) else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence[object]]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[object]], ncols: int) -> Matrix:
    """Basis of {v : rows * v = 0}, one vector per free column, in column order."""
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence[object]], b: Sequence[object]) -> Optional[List[object]]:
    """One solution x of a x = b (free variables set to zero), or None."""
    if len(a) != len(b):
        raise InputError(f"shape mismatch: {len(a)} equations, {len(b)} right-hand sides")
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def inverse(a: Sequence[Sequence[object]]) -> Matrix:
    n = len(a)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise InputError("matrix is singular")
    return [row[n:] for row in red]
