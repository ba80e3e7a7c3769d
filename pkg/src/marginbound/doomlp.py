"""Weight redistribution by linear programming over margin partitions (DOOM-LP).

Examples are split by their margin ``M_i = y_i f(x_i)`` into a losing set
(``M <= 0``), a linear set (``0 <= M <= delta``) and a safe set
(``M >= delta``).  On a fixed partition the ramp cost
``P_n phi_delta(y f(x))`` is affine in the weights, so one LP finds the best
weights that respect the partition; examples left on a boundary are then
moved to the neighbouring set and the LP is solved again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .lp import StandardLP, Status, solve
from .margins import MarginProfile
from .stumps import predict_all

BOUNDARY_TOL = 1e-8
SIMPLEX_TOL = 1e-9
MAX_ITER = 1000

MINUS, LINEAR, SAFE = 0, 1, 2


def ramp(u) -> np.ndarray:
    """``phi(u) = 1`` for ``u <= 0``, ``1 - u`` on ``(0, 1]``, 0 beyond."""
    u = np.asarray(u, dtype=float)
    return np.where(u <= 0, 1.0, np.where(u <= 1, 1.0 - u, 0.0))


def margin_cost(profile: MarginProfile | np.ndarray, delta: float) -> float:
    """``P_n phi(m / delta)``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if isinstance(profile, MarginProfile):
        mass = np.diff(profile.cumulative, prepend=0.0)
        return float(mass @ ramp(profile.sorted_margins / delta))
    m = np.asarray(profile, dtype=float)
    return float(ramp(m / delta).mean())


def rademacher_margin_bound(profile: MarginProfile, rad_estimate: float, t: float, delta_grid):
    """Minimise ``P_n phi_delta + 8 R / delta + sqrt(log log2(2/delta) / n)`` over the grid, plus ``t / sqrt(n)``.

    Returns ``(best_delta, value)``; the first minimiser wins ties.
    """
    grid = np.asarray(delta_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty delta grid")
    if np.any((grid <= 0) | (grid > 1)):
        raise ValueError("delta grid must lie in (0, 1]")
    if rad_estimate < 0:
        raise ValueError("Rademacher estimate must be nonnegative")
    n = profile.n
    values = np.array([
        margin_cost(profile, d) + 8.0 * rad_estimate / d + math.sqrt(math.log(math.log2(2.0 / d)) / n)
        for d in grid
    ])
    k = int(np.argmin(values))
    return float(grid[k]), float(values[k] + t / math.sqrt(n))


def default_delta_grid() -> np.ndarray:
    return 0.02 * np.arange(1, 51)


def choose_delta(margins, rad_estimate: float, grid=None) -> float:
    grid = default_delta_grid() if grid is None else grid
    best, _ = rademacher_margin_bound(MarginProfile.from_margins(margins), rad_estimate, 0.0, grid)
    return best


def margin_matrix(ds, stumps) -> np.ndarray:
    """``G[i, k] = y_i h_k(x_i)``, shape ``(n, T)``."""
    return (predict_all(stumps, ds.features) * ds.labels[None, :]).T.astype(float)


@dataclass(frozen=True)
class MarginPartition:
    membership: np.ndarray  # MINUS / LINEAR / SAFE per example
    delta: float

    @classmethod
    def initial(cls, M, delta: float, tol: float = BOUNDARY_TOL) -> "MarginPartition":
        """Margins at 0 start in the losing set, margins at ``delta`` in the safe set."""
        M = np.asarray(M, dtype=float)
        mem = np.full(M.size, LINEAR, dtype=np.int8)
        mem[M <= tol] = MINUS
        mem[M >= delta - tol] = SAFE
        return cls(mem, delta)

    def indices(self, which: int) -> np.ndarray:
        return np.nonzero(self.membership == which)[0]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return tuple(int(np.count_nonzero(self.membership == s)) for s in (MINUS, LINEAR, SAFE))

    def flipped(self, M, tol: float = BOUNDARY_TOL) -> "MarginPartition":
        """Move boundary examples to the neighbouring set.

        All three rules read the memberships from before the update:
        linear examples at 0 go to the losing set and losing ones at 0 to the
        linear set; linear examples at ``delta`` go to the safe set and safe
        ones at ``delta`` to the linear set.
        """
        M = np.asarray(M, dtype=float)
        old = self.membership
        at0 = np.abs(M) <= tol
        atd = np.abs(M - self.delta) <= tol
        new = old.copy()
        new[(old == LINEAR) & at0] = MINUS
        new[(old == MINUS) & at0] = LINEAR
        new[(old == SAFE) & atd] = LINEAR
        new[(old == LINEAR) & atd & ~at0] = SAFE
        return MarginPartition(new, self.delta)

    def consistent_with(self, M, tol: float = BOUNDARY_TOL) -> bool:
        M = np.asarray(M, dtype=float)
        mem = self.membership
        return bool(np.all(M[mem == MINUS] <= tol)
                    and np.all((M[mem == LINEAR] >= -tol) & (M[mem == LINEAR] <= self.delta + tol))
                    and np.all(M[mem == SAFE] >= self.delta - tol))


def linear_coefficients(G: np.ndarray, partition: MarginPartition) -> np.ndarray:
    """``b_k = -sum_{i in S_l} y_i h_k(x_i)``."""
    return -G[partition.membership == LINEAR].sum(axis=0)


def build_partition_lp(G: np.ndarray, partition: MarginPartition) -> StandardLP:
    """LP over ``(w, slacks)`` minimising ``b.w`` inside the partition.

    Rows: the simplex constraint, then per example in index order one row
    (two for the linear set).  There is one slack or surplus variable per
    inequality, so the program has ``T + n + |S_l|`` variables and
    ``n + |S_l| + 1`` equality constraints.
    """
    n, T = G.shape
    mem = partition.membership
    delta = partition.delta
    n_lin = int(np.count_nonzero(mem == LINEAR))
    rows = n + n_lin + 1
    cols = T + n + n_lin
    A = np.zeros((rows, cols))
    rhs = np.zeros(rows)
    A[0, :T] = 1.0
    rhs[0] = 1.0
    r, s = 1, T
    for i in range(n):
        if mem[i] == MINUS:          # M_i + s = 0
            A[r, :T] = G[i]
            A[r, s] = 1.0
            r, s = r + 1, s + 1
        elif mem[i] == LINEAR:       # M_i - s = 0 ;  M_i + s' = delta
            A[r, :T] = G[i]
            A[r, s] = -1.0
            A[r + 1, :T] = G[i]
            A[r + 1, s + 1] = 1.0
            rhs[r + 1] = delta
            r, s = r + 2, s + 2
        else:                        # M_i - s = delta
            A[r, :T] = G[i]
            A[r, s] = -1.0
            rhs[r] = delta
            r, s = r + 1, s + 1
    c = np.zeros(cols)
    c[:T] = linear_coefficients(G, partition)
    return StandardLP(c, A, rhs)


@dataclass(frozen=True)
class DoomIteration:
    iteration: int
    c_min: float
    c: float
    n_minus: int
    n_linear: int
    n_safe: int
    margin_cost: float
    accepted: bool
    lp_rows: int
    lp_cols: int


@dataclass(frozen=True)
class DoomResult:
    weights: np.ndarray
    status: str
    iterations: tuple[DoomIteration, ...]
    partition: MarginPartition
    delta: float

    @property
    def objectives(self) -> list[float]:
        return [it.c for it in self.iterations if it.accepted]


def _check_simplex(w):
    if np.any(w < -1e-10) or abs(w.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError("weights must be nonnegative and sum to 1")


def doom_lp(initial_w, G: np.ndarray, delta: float, max_iter: int = MAX_ITER,
            tol: float = BOUNDARY_TOL) -> DoomResult:
    """Run the partition/LP descent from ``initial_w`` for margin matrix ``G``.

    Each pass records ``C_min = b.w`` for the current partition, solves the
    partition LP, and compares the optimum ``C = b.w'`` with ``C_min`` using
    the same ``b``; the loop stops at the first pass without a decrease, when
    the linear set is empty, or after ``max_iter`` passes.
    """
    G = np.asarray(G, dtype=float)
    w = np.asarray(initial_w, dtype=float).ravel().copy()
    if w.size != G.shape[1]:
        raise ValueError("one initial weight per classifier required")
    _check_simplex(w)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    T = G.shape[1]
    M = G @ w
    part = MarginPartition.initial(M, delta, tol)
    history = []
    status = "iteration_cap"
    for it in range(1, max_iter + 1):
        if not np.any(part.membership == LINEAR):
            status = "no_linear_examples"
            break
        b = linear_coefficients(G, part)
        c_min = float(b @ w)
        lp = build_partition_lp(G, part)
        sol = solve(lp)
        if sol.status is not Status.OPTIMAL:
            raise NumericalError(f"partition LP {sol.status.value} at iteration {it}")
        w_new = np.clip(sol.x[:T], 0.0, None)
        w_new /= w_new.sum()
        c = float(b @ w_new)
        accepted = c < c_min - 1e-9 * (1.0 + abs(c_min))
        if accepted:
            w = w_new
            M = G @ w
            part = part.flipped(M, tol)
        sizes = part.sizes
        history.append(DoomIteration(it, c_min, c, *sizes, margin_cost(M, delta), accepted,
                                     *lp.shape))
        if not accepted:
            status = "converged"
            break
    return DoomResult(w, status, tuple(history), part, delta)
