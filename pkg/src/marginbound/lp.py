"""Dense two-phase simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Pricing is Dantzig's most-negative reduced cost until a run of degenerate
pivots, after which Bland's smallest-index rule takes over until the
objective moves again; a cycle would have to consist of degenerate pivots
only, which Bland's rule forbids.  The leaving row is always chosen by the
smallest basic index among ratio ties.  The tableau is rebuilt from the
original data every ``REINVERT_EVERY`` pivots and before optimality is
declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NumericalError

PIVOT_TOL = 1e-10
COST_TOL = 1e-9
FEAS_TOL = 1e-8
BLAND_AFTER = 500     # consecutive degenerate pivots before switching to Bland's rule
REINVERT_EVERY = 100


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class StandardLP:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).ravel()
        if A.ndim != 2 or A.shape != (b.size, c.size):
            raise ValueError(f"inconsistent LP dimensions: A {A.shape}, b {b.shape}, c {c.shape}")
        neg = b < 0
        A[neg] *= -1.0
        b[neg] *= -1.0
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def shape(self):
        return self.A.shape

    def to_text(self) -> str:
        rows = [" ".join(repr(float(v)) for v in np.append(a, bi)) for a, bi in zip(self.A, self.b)]
        rows.append(" ".join(repr(float(v)) for v in self.c))
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class LPSolution:
    status: Status
    x: np.ndarray
    objective_value: float
    basis: tuple[int, ...] = ()
    reduced_costs: np.ndarray = field(default_factory=lambda: np.empty(0))
    phase1_objective: float = 0.0
    pivots: int = 0


def _unit_columns(A, b=None) -> dict[int, int]:
    """Map row -> first column equal to that row's unit vector.

    With ``b`` given, rows with zero right-hand side whose only singleton is
    a -1 are negated in place so that column becomes a unit vector.
    """
    found: dict[int, int] = {}
    nz = (A != 0).sum(axis=0)
    singles = np.nonzero(nz == 1)[0]
    for j in singles:
        i = int(np.nonzero(A[:, j])[0][0])
        if A[i, j] == 1.0 and i not in found:
            found[i] = int(j)
    if b is not None:
        for j in singles:
            i = int(np.nonzero(A[:, j])[0][0])
            if A[i, j] == -1.0 and b[i] == 0.0 and i not in found:
                A[i] *= -1.0
                found[i] = int(j)
    return found


class _Tableau:
    """Simplex tableau over ``[A | artificials]`` with the cost row last."""

    def __init__(self, A, b):
        m, k = A.shape
        A = A.copy()
        unit = _unit_columns(A, b)
        need = [i for i in range(m) if i not in unit]
        art = np.zeros((m, len(need)))
        art[need, np.arange(len(need))] = 1.0
        self.full = np.hstack([A, art])
        self.b = b
        self.rows = list(range(m))
        self.basis = [0] * m
        for i, j in unit.items():
            self.basis[i] = j
        for a, i in enumerate(need):
            self.basis[i] = k + a
        self.n_art = len(need)
        self.ncols = k + len(need)
        self.cost = np.zeros(self.ncols)
        self.pivots = 0
        self.reinvert()

    @property
    def m(self):
        return len(self.rows)

    def set_cost(self, cost):
        self.cost = np.zeros(self.ncols)
        self.cost[:cost.size] = cost
        self.reinvert()

    def reinvert(self):
        """Rebuild the tableau from the original data and the current basis."""
        F = self.full[self.rows]
        B = F[:, self.basis]
        try:
            body = np.linalg.solve(B, np.hstack([F, self.b[self.rows, None]]))
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular basis during reinversion") from exc
        m = self.m
        T = np.zeros((m + 1, self.ncols + 1))
        T[:m] = body
        T[:m, self.basis] = np.eye(m)
        T[:m, -1] = np.maximum(T[:m, -1], 0.0)
        cb = self.cost[self.basis]
        T[m, :-1] = self.cost - cb @ T[:m, :-1]
        T[m, self.basis] = 0.0
        T[m, -1] = -cb @ T[:m, -1]
        self.T = T

    def pivot(self, r, s):
        T = self.T
        T[r] /= T[r, s]
        col = T[:, s].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        if 2 * nz.size > col.size:
            T -= np.multiply.outer(col, T[r])
        else:
            T[nz] -= np.multiply.outer(col[nz], T[r])
        T[:, s] = 0.0
        T[r, s] = 1.0
        rhs = T[:self.m, -1]
        rhs[rhs < 0.0] = 0.0  # round-off only; basic values are nonnegative
        self.basis[r] = s
        self.pivots += 1
        if self.pivots % REINVERT_EVERY == 0:
            self.reinvert()

    def run(self, ncols, max_pivots):
        """Iterate on the first ``ncols`` columns; returns False if unbounded."""
        streak = 0
        verified = False
        while True:
            if self.pivots > max_pivots:
                raise NumericalError(f"simplex exceeded {max_pivots} pivots")
            T = self.T
            m = self.m
            neg = np.nonzero(T[m, :ncols] < -COST_TOL)[0]
            if neg.size == 0:
                if verified:
                    return True
                self.reinvert()  # confirm optimality on fresh numbers
                verified = True
                continue
            verified = False
            if streak >= BLAND_AFTER:
                s = int(neg[0])
            else:
                s = int(neg[np.argmin(T[m, neg])])
            colv = T[:m, s]
            rows = np.nonzero(colv > PIVOT_TOL)[0]
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / colv[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            r = int(ties[np.argmin(np.asarray(self.basis)[ties])])
            streak = streak + 1 if best <= 1e-12 else 0
            self.pivot(r, s)

    def drop_row(self, r):
        del self.rows[r]
        del self.basis[r]
        self.T = np.delete(self.T, r, axis=0)


def solve(lp: StandardLP, max_pivots: int | None = None) -> LPSolution:
    A, b, c = lp.A, lp.b, lp.c
    m, k = A.shape
    if max_pivots is None:
        max_pivots = 50 * (m + k) + 1000
    tab = _Tableau(A, b)

    # phase 1: minimise the sum of artificials
    tab.set_cost(np.concatenate([np.zeros(k), np.ones(tab.n_art)]))
    tab.run(tab.ncols, max_pivots)
    phase1 = float(-tab.T[tab.m, -1])
    if phase1 > FEAS_TOL * (1.0 + np.abs(b).sum()):
        return LPSolution(Status.INFEASIBLE, np.full(k, np.nan), np.nan, phase1_objective=phase1,
                          pivots=tab.pivots)

    # drive artificials out of the basis; rows where that is impossible are redundant
    r = 0
    while r < tab.m:
        if tab.basis[r] >= k:
            cand = np.nonzero(np.abs(tab.T[r, :k]) > PIVOT_TOL)[0]
            if cand.size:
                tab.pivot(r, int(cand[np.argmax(np.abs(tab.T[r, cand]))]))
            else:
                tab.drop_row(r)
                continue
        r += 1

    # phase 2 on the original columns only
    tab.full = tab.full[:, :k]
    tab.ncols = k
    tab.set_cost(c)
    if not tab.run(k, max_pivots):
        return LPSolution(Status.UNBOUNDED, np.full(k, np.nan), -np.inf, tuple(tab.basis),
                          phase1_objective=phase1, pivots=tab.pivots)

    basis = tuple(tab.basis)
    x = np.zeros(k)
    x[list(basis)] = tab.T[:tab.m, -1]
    reduced = tab.T[tab.m, :k].copy()
    return LPSolution(Status.OPTIMAL, x, float(c @ x), basis, reduced, phase1, tab.pivots)
