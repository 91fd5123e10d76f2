"""Exact rational LP: minimize c.x subject to A x = b, x >= 0.

Two-phase revised simplex with an explicit Fraction basis inverse and
Bland's rule.  Optimal answers come with a dual certificate that is checked
before returning.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

Matrix = list[list[Fraction]]


class LPError(ValueError):
    """Raised on malformed input or a failed certificate check."""


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    objective: Fraction
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]
    basis: tuple[int, ...]
    pivots: int


def _pivot(binv: Matrix, col: list[Fraction], row: int) -> None:
    """Update B^-1 after the column with B^-1-image ``col`` enters at ``row``."""
    p = col[row]
    r = [v / p for v in binv[row]]
    binv[row] = r
    for i, ci in enumerate(col):
        if i != row and ci:
            bi = binv[i]
            binv[i] = [a - ci * b for a, b in zip(bi, r)]


def _column(a: Matrix, j: int) -> list[Fraction]:
    return [row[j] for row in a]


def _times(binv: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if y), Fraction(0)) for row in binv]


def _simplex(a: Matrix, b: list[Fraction], c: list[Fraction], basis: list[int],
             binv: Matrix, allowed: Sequence[int]) -> tuple[list[Fraction], int]:
    """Run primal simplex from a feasible basis; returns (basic values, pivots)."""
    m = len(a)
    xb = _times(binv, b)
    pivots = 0
    while True:
        cb = [c[j] for j in basis]
        y = [sum((cb[i] * binv[i][k] for i in range(m) if cb[i]), Fraction(0)) for k in range(m)]
        in_basis = set(basis)
        entering = None
        for j in allowed:  # Bland: lowest index with negative reduced cost
            if j in in_basis:
                continue
            reduced = c[j] - sum((y[i] * a[i][j] for i in range(m) if a[i][j]), Fraction(0))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return xb, pivots
        col = _times(binv, _column(a, entering))
        leave, best = None, None
        for i in range(m):
            if col[i] > 0:
                ratio = xb[i] / col[i]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise Unbounded("objective is unbounded below")
        _pivot(binv, col, leave)
        basis[leave] = entering
        xb = _times(binv, b)
        pivots += 1


def solve(a: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Minimize c.x over {x >= 0 : A x = b} exactly, with a verified certificate."""
    A = [[Fraction(v) for v in row] for row in a]
    B = [Fraction(v) for v in b]
    C = [Fraction(v) for v in c]
    m = len(A)
    n = len(C)
    if len(B) != m or any(len(row) != n for row in A):
        raise LPError("inconsistent LP dimensions")
    sign = [1] * m
    for i in range(m):
        if B[i] < 0:
            A[i] = [-v for v in A[i]]
            B[i] = -B[i]
            sign[i] = -1

    # Phase 1: artificial column n+i for row i.
    A1 = [row + [Fraction(int(i == k)) for k in range(m)] for i, row in enumerate(A)]
    c1 = [Fraction(0)] * n + [Fraction(1)] * m
    basis = list(range(n, n + m))
    binv = [[Fraction(int(i == k)) for k in range(m)] for i in range(m)]
    xb, piv1 = _simplex(A1, B, c1, basis, binv, range(n + m))
    if sum(xb[i] for i in range(m) if basis[i] >= n) != 0:
        raise Infeasible("no x >= 0 satisfies A x = b")

    # Drive zero-level artificials out of the basis.
    for i in range(m):
        if basis[i] < n:
            continue
        for j in range(n):
            if j in basis:
                continue
            col = _times(binv, _column(A1, j))
            if col[i] != 0:
                _pivot(binv, col, i)
                basis[i] = j
                piv1 += 1
                break
    # An artificial that stays basic marks its row as a combination of the others.
    dropped = {basis[i] - n for i in range(m) if basis[i] >= n}
    rows = [r for r in range(m) if r not in dropped]
    basis = [j for j in basis if j < n]
    A2 = [A[r] for r in rows]
    B2 = [B[r] for r in rows]
    m2 = len(rows)
    if dropped:
        binv = _invert([[A2[r][j] for j in basis] for r in range(m2)])
    xb, piv2 = _simplex(A2, B2, C, basis, binv, range(n))

    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = xb[i]
    cb = [C[j] for j in basis]
    y2 = [sum((cb[i] * binv[i][k] for i in range(m2)), Fraction(0)) for k in range(m2)]
    y = [Fraction(0)] * m
    for k, r in enumerate(rows):
        y[r] = y2[k] if sign[r] > 0 else -y2[k]
    objective = sum((C[j] * x[j] for j in range(n)), Fraction(0))
    _certify(A2, B2, C, x, y2, objective)
    return LPResult(objective, tuple(x), tuple(y), tuple(basis), piv1 + piv2)


def _invert(mat: Matrix) -> Matrix:
    m = len(mat)
    aug = [list(row) + [Fraction(int(i == k)) for k in range(m)] for i, row in enumerate(mat)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            raise LPError("basis matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def _certify(A: Matrix, B: list[Fraction], C: list[Fraction], x: list[Fraction],
             y: list[Fraction], objective: Fraction) -> None:
    m, n = len(A), len(C)
    if any(v < 0 for v in x):
        raise LPError("certificate: negative primal value")
    for i in range(m):
        if sum((A[i][j] * x[j] for j in range(n)), Fraction(0)) != B[i]:
            raise LPError(f"certificate: row {i} not satisfied")
    for j in range(n):
        if C[j] - sum((y[i] * A[i][j] for i in range(m)), Fraction(0)) < 0:
            raise LPError(f"certificate: column {j} has negative reduced cost")
    if sum((b * v for b, v in zip(B, y)), Fraction(0)) != objective:
        raise LPError("certificate: duality gap is nonzero")


def verify_certificate(a: Sequence[Sequence], b: Sequence, c: Sequence, result: LPResult) -> bool:
    """Independent re-check of primal feasibility, dual feasibility and zero gap."""
    A = [[Fraction(v) for v in row] for row in a]
    B = [Fraction(v) for v in b]
    C = [Fraction(v) for v in c]
    x = list(result.x)
    if any(v < 0 for v in x):
        return False
    for row, rhs in zip(A, B):
        if sum((p * q for p, q in zip(row, x)), Fraction(0)) != rhs:
            return False
    if result.objective != sum((p * q for p, q in zip(C, x)), Fraction(0)):
        return False
    y = list(result.y)
    for j in range(len(C)):
        if C[j] - sum((y[i] * A[i][j] for i in range(len(A))), Fraction(0)) < 0:
            return False
    return sum((p * q for p, q in zip(B, y)), Fraction(0)) == result.objective
