"""Dense two-phase simplex over exact rationals.

Problems have the form

    maximise cᵀz  subject to  A_ub z ≤ b_ub,  A_eq z = b_eq,  z ≥ 0.

Only small problems are intended (a few hundred columns at most).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Number = Fraction | int | float


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    """'optimal', 'infeasible' or 'unbounded'."""
    x: list[Fraction]
    value: Fraction
    pivots: int


def _frac(v: Number) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int], pivot_rule: str):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.rule = pivot_rule
        self.pivots = 0

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        p = row[col]
        if p != 1:
            inv = 1 / p
            row[:] = [a * inv for a in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            factor = other[col]
            if factor:
                other[:] = [a - factor * b if b else a for a, b in zip(other, row)]
                self.rhs[i] -= factor * self.rhs[r]
        self.basis[r] = col
        self.pivots += 1

    def reduced(self, cost: list[Fraction], allowed: int) -> list[Fraction]:
        """cost_j − c_Bᵀ B⁻¹ A_j for columns below ``allowed``."""
        red = cost[:allowed]
        red = list(red)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(allowed):
                    if row[j]:
                        red[j] -= cb * row[j]
        return red

    def optimise(self, cost: list[Fraction], allowed: int) -> str:
        degenerate_run = 0
        while True:
            red = self.reduced(cost, allowed)
            use_bland = self.rule == "bland" or degenerate_run > 50
            col = -1
            if use_bland:
                for j, v in enumerate(red):
                    if v > 0:
                        col = j
                        break
            else:
                best = Fraction(0)
                for j, v in enumerate(red):
                    if v > best:
                        best, col = v, j
            if col < 0:
                return "optimal"
            r, ratio = -1, None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    q = self.rhs[i] / a
                    if ratio is None or q < ratio or (q == ratio and self.basis[i] < self.basis[r]):
                        r, ratio = i, q
            if r < 0:
                return "unbounded"
            degenerate_run = degenerate_run + 1 if ratio == 0 else 0
            self.pivot(r, col)


def solve_lp(c: Sequence[Number], A_ub: Sequence[Sequence[Number]] = (), b_ub: Sequence[Number] = (),
             A_eq: Sequence[Sequence[Number]] = (), b_eq: Sequence[Number] = (),
             pivot_rule: str = "bland") -> LPResult:
    """Maximise cᵀz over the polyhedron; ``pivot_rule`` is 'bland' or 'dantzig'.

    Dantzig's rule falls back to Bland's after 50 consecutive degenerate
    pivots, which rules out cycling.
    """
    if pivot_rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    width = n + m_ub + m  # structural, slack, artificial
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m):
        if i < m_ub:
            coeffs, b = A_ub[i], _frac(b_ub[i])
        else:
            coeffs, b = A_eq[i - m_ub], _frac(b_eq[i - m_ub])
        if len(coeffs) != n:
            raise LPError("constraint row has the wrong length")
        row = [_frac(a) for a in coeffs] + [Fraction(0)] * (m_ub + m)
        if i < m_ub:
            row[n + i] = Fraction(1)
        sign = -1 if b < 0 else 1
        if sign < 0:
            row = [-a for a in row]
            b = -b
        row[n + m_ub + i] = Fraction(1)
        rows.append(row)
        rhs.append(b)
    tab = _Tableau(rows, rhs, [n + m_ub + i for i in range(m)], pivot_rule)

    # Phase one: minimise the artificial total.
    phase1 = [Fraction(0)] * (n + m_ub) + [Fraction(-1)] * m
    tab.optimise(phase1, width)
    infeas = sum(tab.rhs[i] for i, b in enumerate(tab.basis) if b >= n + m_ub)
    if infeas > 0:
        return LPResult("infeasible", [], Fraction(0), tab.pivots)
    # Drive remaining artificials out of the basis, dropping redundant rows.
    keep = []
    for i in range(len(tab.rows)):
        if tab.basis[i] >= n + m_ub:
            col = next((j for j in range(n + m_ub) if tab.rows[i][j] != 0), -1)
            if col < 0:
                continue
            tab.pivot(i, col)
        keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    cost = [_frac(v) for v in c] + [Fraction(0)] * (m_ub + m)
    status = tab.optimise(cost, n + m_ub)
    x = [Fraction(0)] * (n + m_ub)
    for i, b in enumerate(tab.basis):
        x[b] = tab.rhs[i]
    if status == "unbounded":
        return LPResult("unbounded", x[:n], Fraction(0), tab.pivots)
    value = sum((cost[j] * x[j] for j in range(n)), Fraction(0))
    return LPResult("optimal", x[:n], value, tab.pivots)
