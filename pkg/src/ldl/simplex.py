"""Dense two-phase simplex over exact rationals.

Solves ``min c.x  s.t.  A x = b, x >= 0`` with :class:`fractions.Fraction`
arithmetic and returns both the primal point and a dual vector ``y`` with
``A^T y <= c`` (reduced costs nonnegative). When the problem is infeasible the
phase-one duals are returned instead: ``A^T y <= 0`` and ``b.y > 0``, a Farkas
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# consecutive degenerate pivots tolerated before switching to Bland's rule
_DEGENERATE_LIMIT = 50


@dataclass
class LPResult:
    status: str
    x: list | None
    y: list
    value: Fraction | None
    pivots: int


class _Tableau:
    def __init__(self, rows, rhs, n_struct):
        self.rows = rows
        self.rhs = rhs
        m = len(rows)
        self.n_struct = n_struct
        self.n_cols = n_struct + m
        self.basis = [n_struct + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r, j):
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row = [v * inv if v else v for v in row]
            self.rows[r] = row
            self.rhs[r] *= inv
        nz = [k for k, v in enumerate(row) if v]
        br = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if not f:
                continue
            for k in nz:
                other[k] -= f * row[k]
            self.rhs[i] -= f * br
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost, allowed):
        cb = [cost[b] for b in self.basis]
        out = {}
        for j in allowed:
            s = cost[j]
            for i, row in enumerate(self.rows):
                if cb[i] and row[j]:
                    s -= cb[i] * row[j]
            out[j] = s
        return out

    def duals(self, cost, flips):
        """``y_i = sum_r c_B[r] * Binv[r, i]``; artificial columns hold ``Binv``."""
        cb = [cost[b] for b in self.basis]
        m = len(self.rows)
        y = []
        for i in range(m):
            col = self.n_struct + i
            s = Fraction(0)
            for r in range(m):
                if cb[r] and self.rows[r][col]:
                    s += cb[r] * self.rows[r][col]
            y.append(-s if flips[i] else s)
        return y

    def run(self, cost, allowed):
        """Minimize ``cost`` over the current basis using columns in ``allowed``."""
        degenerate = 0
        allowed = sorted(allowed)
        while True:
            rc = self.reduced_costs(cost, allowed)
            neg = [j for j in allowed if rc[j] < 0]
            if not neg:
                return OPTIMAL
            if degenerate >= _DEGENERATE_LIMIT:
                j = neg[0]
            else:
                j = min(neg, key=lambda k: (rc[k], k))
            best = None
            for i, row in enumerate(self.rows):
                if row[j] > 0:
                    ratio = self.rhs[i] / row[j]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            degenerate = degenerate + 1 if best[0][0] == 0 else 0
            self.pivot(best[1], j)


def linprog_exact(c, a_eq, b_eq) -> LPResult:
    """Exact two-phase simplex. ``a_eq`` is a list of rows."""
    m = len(a_eq)
    n = len(c)
    c = [Fraction(v) for v in c]
    flips = []
    rows, rhs = [], []
    for i in range(m):
        row = [Fraction(v) for v in a_eq[i]]
        bi = Fraction(b_eq[i])
        flip = bi < 0
        if flip:
            row = [-v for v in row]
            bi = -bi
        flips.append(flip)
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append(row + art)
        rhs.append(bi)
    tab = _Tableau(rows, rhs, n)

    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1_cost, range(n + m))
    infeas = sum(tab.rhs[i] for i in range(m) if tab.basis[i] >= n)
    if infeas > 0:
        y = tab.duals(phase1_cost, flips)
        return LPResult(INFEASIBLE, None, y, None, tab.pivots)

    # drive zero-level artificials out of the basis where a structural pivot exists
    for i in range(m):
        if tab.basis[i] >= n:
            for j in range(n):
                if tab.rows[i][j] != 0:
                    tab.pivot(i, j)
                    break

    full_cost = c + [Fraction(0)] * m
    status = tab.run(full_cost, range(n))
    y = tab.duals(full_cost, flips)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, y, None, tab.pivots)
    x = [Fraction(0)] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[i]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, y, value, tab.pivots)
