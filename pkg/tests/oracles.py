"""Slow, direct reference implementations used to check the fast code paths."""

from __future__ import annotations

import itertools
import math

import numpy as np

from marginbound.stumps import Orientation, Stump


def brute_force_stump(X, y, w, tie_tol=1e-12):
    """Try every stump (constants, midpoint cuts, both orientations); lexicographic ties."""
    X = np.asarray(X, dtype=float)
    cands = [Stump.constant(-1), Stump.constant(1)]
    for j in range(X.shape[1]):
        v = np.unique(X[:, j])
        for a, b in zip(v[:-1], v[1:]):
            for o in (Orientation.LE, Orientation.GE):
                cands.append(Stump(j, float((a + b) / 2.0), o))
    errs = []
    for s in cands:
        pred = np.array([1 if (x[s.feature] <= s.threshold if s.orientation is Orientation.LE
                               else x[s.feature] >= s.threshold) else -1 for x in X])
        errs.append(float(w[pred != y].sum()))
    best = min(errs)
    winners = [s for s, e in zip(cands, errs) if e <= best + tie_tol]
    s = min(winners)
    return s, errs[cands.index(s)]


def linear_scan_dimension(weights, Delta):
    """Smallest d such that the weight outside the d largest |w| is at most Delta.

    Suffix sums are accumulated from the smallest weight up, and a total of 1
    up to rounding counts as exactly 1 (a proper convex combination).
    """
    a = sorted((abs(float(v)) for v in weights if v != 0), reverse=True)
    tails = [0.0] * (len(a) + 1)
    for d in range(len(a) - 1, -1, -1):
        tails[d] = tails[d + 1] + a[d]
    tails = [min(t, 1.0) for t in tails]
    for d in range(len(a) + 1):
        if tails[d] <= Delta:
            return d
    return len(a)


def eps_n_grid(weights, delta, alpha, n, grid_points=10_000, extra=()):
    """Minimise the Delta-bound objective over a Delta grid (plus ``extra`` points)."""
    gamma = 2 * alpha / (alpha + 2)
    grid = np.concatenate([np.linspace(0.0, 1.0, grid_points), np.asarray(extra, dtype=float)])
    best = math.inf
    for Delta in grid:
        d = linear_scan_dimension(weights, Delta)
        if d > n:
            continue
        dim = 0.0 if d == 0 else d / n * (math.log(1 / delta) + math.log(n * math.e ** 2 / d))
        best = min(best, dim + (Delta / delta) ** gamma * n ** (-2 / (alpha + 2)))
    return max(best, 2 * math.log(n) / n)


def gamma_margin_grid(margins, gamma, n, grid_points=10_000, tol=1e-14):
    """Grid scan for the first infeasible delta, then bisection down to ``tol``."""
    m = np.sort(np.asarray(margins, dtype=float))
    c = n ** (gamma / 2 - 1)

    def feasible(d):
        return d ** gamma * (np.searchsorted(m, d, side="right") / m.size) <= c

    grid = np.linspace(0.0, 1.0, grid_points + 1)[1:-1]
    bad = [d for d in grid if not feasible(d)]
    if not bad:
        hi = 1.0
        lo = grid[-1]
        if feasible(math.nextafter(1.0, 0.0)):
            return 1.0
    else:
        hi = bad[0]
        i = int(np.searchsorted(grid, hi))
        lo = grid[i - 1] if i > 0 else 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def vertex_enumeration(c, A, b, tol=1e-9):
    """Best basic feasible solution of ``min c.x, Ax = b, x >= 0`` by trying every basis.

    Returns ``(value, x)`` or ``(None, None)`` when no basic feasible solution exists.
    The caller must ensure the problem is bounded.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, k = A.shape
    rank = np.linalg.matrix_rank(A)
    rows = None
    for r in itertools.combinations(range(m), rank):
        if np.linalg.matrix_rank(A[list(r)]) == rank:
            rows = list(r)
            break
    best, best_x = None, None
    for cols in itertools.combinations(range(k), rank):
        B = A[np.ix_(rows, cols)]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b[rows])
        if np.any(xb < -tol):
            continue
        x = np.zeros(k)
        x[list(cols)] = xb
        if np.max(np.abs(A @ x - b)) > 1e-7:
            continue  # the dropped rows are not implied after all
        v = float(c @ x)
        if best is None or v < best - 1e-12:
            best, best_x = v, x
    return best, best_x


def monte_carlo_margin_cdf(f, concept, deltas, num_points, rng):
    """Fractions of uniform draws on [0, 1] with ``y f(x) <= delta``, one per delta."""
    x = rng.uniform(0.0, 1.0, size=num_points)
    margins = concept.label(x) * f.predict(x.reshape(-1, 1))
    return [float(np.mean(margins <= d)) for d in deltas]


def binomial_se(p, num_points):
    return math.sqrt(p * (1 - p) / num_points)
