"""Empirical margin distributions, gamma-margins and psi-type bounds.

All functionals here are deterministic functions of a margin profile; none
of the absolute constants of the underlying probability bounds are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

EPS_TOL = 1e-10       # absolute bisection tolerance on epsilon
PHI_INV_RTOL = 1e-12  # relative bisection tolerance for a numerical phi inverse


@dataclass(frozen=True)
class MarginProfile:
    """Sorted margins with their probability masses.

    Empirical profiles give every margin mass ``1/n``.  ``weighted`` builds a
    general discrete law (used for exact margin distributions); ``n`` is then
    the sample size the bounds should be computed for.
    """

    sorted_margins: np.ndarray
    cumulative: np.ndarray
    n: int

    @classmethod
    def from_margins(cls, margins) -> "MarginProfile":
        m = np.sort(np.asarray(margins, dtype=float).ravel())
        if m.size == 0:
            raise ValueError("empty margin profile")
        cum = np.arange(1, m.size + 1) / m.size
        return cls(m, cum, m.size)

    @classmethod
    def weighted(cls, values, masses, n: int) -> "MarginProfile":
        values = np.asarray(values, dtype=float).ravel()
        masses = np.asarray(masses, dtype=float).ravel()
        order = np.argsort(values, kind="stable")
        cum = np.cumsum(masses[order])
        return cls(values[order], cum / cum[-1], int(n))

    def cdf(self, delta) -> np.ndarray | float:
        """``P{margin <= delta}``; vectorised over ``delta``."""
        k = np.searchsorted(self.sorted_margins, delta, side="right")
        out = np.where(k > 0, self.cumulative[np.maximum(k - 1, 0)], 0.0)
        return float(out) if np.ndim(out) == 0 else out


def margin_cdf(profile: MarginProfile, delta: float) -> float:
    return profile.cdf(delta)


@dataclass(frozen=True)
class BoundParams:
    n: int
    t: float
    gamma: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.n < 1 or not self.t > 0:
            raise ValueError("need n >= 1 and t > 0")
        if self.gamma is None and self.alpha is not None:
            object.__setattr__(self, "gamma", 2 * self.alpha / (self.alpha + 2))
        elif self.alpha is None and self.gamma is not None:
            object.__setattr__(self, "alpha", 2 * self.gamma / (2 - self.gamma))

    @property
    def floor(self) -> float:
        """Smallest admissible epsilon, ``max(t, 2 log n) / n``."""
        return max(self.t, 2.0 * math.log(self.n)) / self.n


class PsiFunction:
    """A concave nondecreasing ``psi`` on ``[0, inf)`` with ``psi(0) = 0``.

    ``phi(x) = psi(x) / x``.  ``phi_inv(y)`` is the largest ``x`` with
    ``phi(x) = y``; pass an analytic inverse when one exists, otherwise it is
    found by bisection.  ``min_eps(n)`` gives the smallest epsilon for which
    the inverse is defined at ``sqrt(eps n)``.
    """

    def __init__(self, psi: Callable[[float], float], phi_inv: Callable[[float], float] | None = None,
                 min_eps: Callable[[int], float] | None = None, check_upto: float = 10.0,
                 name: str = "psi"):
        self.psi = psi
        self._phi_inv = phi_inv
        self._min_eps = min_eps
        self.name = name
        self._validate(check_upto)

    def _validate(self, upto: float, points: int = 1024):
        x = np.linspace(0.0, upto, points)
        v = np.array([self.psi(float(u)) for u in x])
        if abs(v[0]) > 1e-12:
            raise ValueError(f"{self.name}: psi(0) must be 0")
        if np.any(np.diff(v) < -1e-12):
            raise ValueError(f"{self.name}: psi must be nondecreasing")
        if np.any(v[1:-1] + 1e-12 < (v[:-2] + v[2:]) / 2.0):
            raise ValueError(f"{self.name}: psi must be concave")

    def __call__(self, x: float) -> float:
        return self.psi(x)

    def phi(self, x: float) -> float:
        return self.psi(x) / x

    def min_eps(self, n: int) -> float:
        return 0.0 if self._min_eps is None else self._min_eps(n)

    def phi_inv(self, y: float) -> float:
        if self._phi_inv is not None:
            return self._phi_inv(y)
        return _phi_inv_bisect(self.phi, y)

    @classmethod
    def power(cls, alpha: float) -> "PsiFunction":
        """``psi(x) = x^(1 - alpha/2)``, so ``phi^-1(y) = y^(-2/alpha)``."""
        if not 0 < alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        e = 1.0 - alpha / 2.0
        return cls(lambda x: x ** e, lambda y: y ** (-2.0 / alpha), name=f"power({alpha})")

    @classmethod
    def vc(cls) -> "PsiFunction":
        """``psi(x) = x sqrt(log(e/x))`` on (0, 1], ``x`` beyond.

        ``phi^-1(y) = exp(1 - y^2)`` for ``y >= 1``, i.e. ``eps >= 1/n``.
        The slope jumps up at 1, so concavity is only checked on [0, 1].
        """
        def psi(x):
            if x <= 0:
                return 0.0
            return x * math.sqrt(math.log(math.e / x)) if x <= 1 else x

        def phi_inv(y):
            if y < 1:
                raise ValueError("VC psi: phi inverse needs y >= 1 (eps >= 1/n)")
            return math.exp(1.0 - y * y)

        return cls(psi, phi_inv, min_eps=lambda n: 1.0 / n, check_upto=1.0, name="vc")

    @classmethod
    def tabulated(cls, xs, ys) -> "PsiFunction":
        """Piecewise-linear ``psi`` through ``(xs, ys)``, continued linearly past the last knot."""
        xs = np.concatenate([[0.0], np.asarray(xs, dtype=float)])
        ys = np.concatenate([[0.0], np.asarray(ys, dtype=float)])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("tabulated psi needs increasing positive abscissae")
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])

        def psi(x):
            if x <= xs[-1]:
                return float(np.interp(x, xs, ys))
            return float(ys[-1] + slope * (x - xs[-1]))

        return cls(psi, check_upto=float(xs[-1]), name="tabulated")


def _phi_inv_bisect(phi, y: float) -> float:
    """Largest ``x > 0`` with ``phi(x) >= y`` for nonincreasing ``phi``."""
    hi = 1.0
    while phi(hi) >= y:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError(f"phi inverse undefined at {y}: phi stays >= {y} on (0, inf)")
    lo = hi / 2.0
    while phi(lo) < y:
        lo /= 2.0
        if lo < 1e-300:
            raise ValueError(f"phi inverse undefined at {y}: phi never reaches {y}")
    while hi - lo > PHI_INV_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if phi(mid) >= y:
            lo = mid
        else:
            hi = mid
    # phi(hi) < y <= phi(lo): no solution when phi jumps over y
    if abs(phi(lo) - y) > 1e-6 * max(1.0, abs(y)):
        raise ValueError(f"phi inverse undefined at {y}: phi jumps over it")
    return lo


def psi_delta(psi: PsiFunction, n: int, eps: float) -> float:
    """``delta_n^psi(eps) = phi^-1(sqrt(eps n)) / sqrt(eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps < psi.min_eps(n) * (1 - 1e-12):
        raise ValueError(f"eps={eps} below the domain of {psi.name} (needs >= {psi.min_eps(n)})")
    return psi.phi_inv(math.sqrt(eps * n)) / math.sqrt(eps)


def gamma_margin(profile: MarginProfile, gamma: float, n: int | None = None) -> float:
    """``sup{delta in (0, 1): delta^gamma P{f <= delta} <= n^(gamma/2 - 1)}``.

    Exact: on each stretch between consecutive margins the distribution
    function is a constant ``F`` and the condition reads
    ``delta <= (c / F)^(1/gamma)``.  Returns 1 when the condition holds on
    all of (0, 1), and 0 when it holds nowhere.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    n = profile.n if n is None else n
    c = n ** (gamma / 2.0 - 1.0)
    m = profile.sorted_margins
    inside = np.unique(m[(m > 0) & (m < 1)])
    starts = np.concatenate([[0.0], inside])
    ends = np.concatenate([inside, [1.0]])
    levels = profile.cdf(starts)
    for a, b, F in zip(starts, ends, np.atleast_1d(levels)):
        if F <= 0:
            continue
        r = (c / F) ** (1.0 / gamma)
        if r < a:
            return float(a)
        if r < b:
            return float(r)
    return 1.0


def gamma_bound(profile: MarginProfile, gamma: float, n: int | None = None) -> float:
    """``1 / (n^(1 - gamma/2) delta^gamma)`` at the gamma-margin; ``inf`` if that margin is 0."""
    n = profile.n if n is None else n
    d = gamma_margin(profile, gamma, n)
    if d <= 0:
        return math.inf
    return 1.0 / (n ** (1.0 - gamma / 2.0) * d ** gamma)


def empirical_psi_bound(profile: MarginProfile, psi: PsiFunction, params: BoundParams) -> float:
    """``inf{eps >= floor : P_n{f <= delta_n^psi(eps)} <= eps}``.

    ``delta_n^psi`` decreases in eps and the distribution function increases
    in delta, so feasibility is monotone in eps and bisection applies.  The
    returned value is feasible and within ``EPS_TOL`` of the infimum.  At
    eps = 1 the condition always holds, so the result never exceeds 1.
    """
    n = params.n
    lo = max(params.floor, psi.min_eps(n))
    if lo > 1:
        raise ValueError(f"floor {lo} exceeds 1; nothing to search")

    def feasible(eps):
        return profile.cdf(psi_delta(psi, n, eps)) <= eps

    if feasible(lo):
        return lo
    hi = 1.0
    while hi - lo > EPS_TOL:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def vc_psi_bound(profile: MarginProfile, params: BoundParams) -> float:
    return empirical_psi_bound(profile, PsiFunction.vc(), params)
