"""Approximate Delta-dimension of a convex combination and the bounds built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import ConvexCombination
from .margins import MarginProfile

DELTA_HAT_TOL = 1e-10  # absolute, while delta_hat is searched in delta
LOG_TOL = 1e-12        # relative, while it is searched in log(1/delta)
LOG_MAX = 1e6          # log(1/delta) beyond which delta_hat is reported as 0
HULL_TOL = 1e-9


@dataclass(frozen=True)
class WeightSpectrum:
    """Absolute weights of the merged representation, largest first.

    ``tails[d]`` is the total weight left after keeping the ``d`` largest
    terms, so ``tails[0] == total`` and ``tails[N] == 0``.
    """

    sorted_abs_weights: np.ndarray
    tails: np.ndarray

    @classmethod
    def from_weights(cls, weights) -> "WeightSpectrum":
        a = np.sort(np.abs(np.asarray(weights, dtype=float).ravel()))[::-1]
        a = a[a > 0]
        tails = np.concatenate([np.cumsum(a[::-1])[::-1], [0.0]])
        if tails[0] > 1.0 + HULL_TOL:
            raise ValueError(f"sum of |weights| is {tails[0]}, outside the convex hull")
        # representations with total 1 up to rounding are proper combinations
        tails = np.minimum(tails, 1.0)
        return cls(a, tails)

    @classmethod
    def from_combination(cls, f: ConvexCombination) -> "WeightSpectrum":
        """Spectrum after summing the weights of identical stumps."""
        merged: dict = {}
        for w, s in zip(f.weights, f.stumps):
            merged[s] = merged.get(s, 0.0) + float(w)
        return cls.from_weights(list(merged.values()))

    @property
    def N(self) -> int:
        return self.sorted_abs_weights.size

    @property
    def total(self) -> float:
        return float(self.tails[0])


@dataclass(frozen=True)
class DeltaBoundParams:
    alpha: float
    n: int
    t: float = 1.0
    zeta: float = 1.0
    K: float = 1.0
    T: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if self.n < 1 or self.T < 1:
            raise ValueError("n and T must be >= 1")
        if not 0 <= self.zeta <= 1 or not self.K > 0:
            raise ValueError("need zeta in [0, 1] and K > 0")

    @property
    def exponent(self) -> float:
        """``2 alpha / (alpha + 2)``, the matched gamma."""
        return 2.0 * self.alpha / (self.alpha + 2.0)


def delta_dimension(spec: WeightSpectrum, Delta: float) -> int:
    """Smallest ``d`` whose tail weight is at most ``Delta``."""
    # tails is nonincreasing; count entries strictly above Delta
    return int(np.count_nonzero(spec.tails > Delta))


def _dimension_term(d, n: int, log_inv_delta: float) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    safe = np.where(d > 0, d, 1.0)
    return d / n * (log_inv_delta + np.log(n * math.e ** 2 / safe))


def _margin_term(Delta, delta: float, params: DeltaBoundParams, log_inv_delta=None) -> np.ndarray:
    """``(Delta / delta)^gamma n^(-2/(alpha+2))``; in log form when ``delta`` is not representable."""
    Delta = np.asarray(Delta, dtype=float)
    scale = params.n ** (-2.0 / (params.alpha + 2.0))
    with np.errstate(divide="ignore", over="ignore"):
        if log_inv_delta is None:
            # subnormal delta overflows to inf, the correct limit
            return (Delta / delta) ** params.exponent * scale
        return np.exp(params.exponent * (np.log(Delta) + log_inv_delta)) * scale


def _candidates(spec: WeightSpectrum, limit: int | None = None):
    dmax = spec.N if limit is None else min(spec.N, limit)
    d = np.arange(dmax + 1)
    return d, spec.tails[:dmax + 1]


def _log_inv(delta: float, log_inv_delta) -> float:
    if log_inv_delta is not None:
        if not log_inv_delta > 0:
            raise ValueError("log(1/delta) must be positive")
        return float(log_inv_delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return -math.log(delta)


def optimal_dimension(spec: WeightSpectrum, delta: float, params: DeltaBoundParams,
                      log_inv_delta: float | None = None):
    """``(value, d, Delta)`` minimising the Delta-bound objective before the ``2 log n / n`` floor.

    For a fixed dimension ``d`` the margin term grows with Delta, so the
    smallest Delta achieving ``d`` (the tail weight ``tails[d]``) is optimal
    and only ``d = 0 .. min(N, n)`` need be checked.  Pass
    ``log_inv_delta = log(1/delta)`` instead of ``delta`` for margins too
    small to represent.
    """
    u = _log_inv(delta, log_inv_delta)
    d, Delta = _candidates(spec, params.n)
    obj = _dimension_term(d, params.n, u) + _margin_term(Delta, delta, params, log_inv_delta)
    k = int(np.argmin(obj))
    return float(obj[k]), int(d[k]), float(Delta[k])


def eps_n(spec: WeightSpectrum, delta: float, params: DeltaBoundParams,
          log_inv_delta: float | None = None) -> float:
    value, _, _ = optimal_dimension(spec, delta, params, log_inv_delta)
    return max(value, 2.0 * math.log(params.n) / params.n)


def log_inv_delta_hat(profile: MarginProfile, spec: WeightSpectrum, params: DeltaBoundParams) -> float:
    """``log(1 / delta_hat)``, where ``delta_hat = sup{delta in (0, 1/2) : P_n{f <= delta} <= eps_n(f; delta)}``.

    The feasible set is an initial segment (the left side increases in
    delta, the right side decreases), so the supremum is located by binary
    search over the sorted margins followed by bisection inside one segment.
    ``eps_n`` grows without bound as delta goes to 0, so the set is never
    empty; below the smallest positive margin the bisection runs on
    ``log(1/delta)``, which keeps supremums like ``exp(-800)`` finite.
    Returns ``log 2`` when feasible throughout, and ``inf`` only if
    ``log(1/delta)`` would exceed ``LOG_MAX``.
    """
    def feasible(delta):
        return profile.cdf(delta) <= eps_n(spec, delta, params)

    m = profile.sorted_margins
    marks = np.unique(m[(m > 0) & (m < 0.5)])
    # first margin point that is infeasible
    lo_i, hi_i = 0, marks.size
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if feasible(marks[mid]):
            lo_i = mid + 1
        else:
            hi_i = mid
    b = marks[lo_i] if lo_i < marks.size else 0.5
    # on (a, b) the distribution function is constant; find where eps_n drops below it
    if lo_i > 0:
        a = marks[lo_i - 1]
        level = profile.cdf(a)
        if eps_n(spec, math.nextafter(b, 0.0), params) >= level:
            return -math.log(b)
        lo, hi = a, b
        while hi - lo > DELTA_HAT_TOL:
            mid = 0.5 * (lo + hi)
            if eps_n(spec, mid, params) >= level:
                lo = mid
            else:
                hi = mid
        return -math.log(lo)
    level = profile.cdf(0.0)
    u_lo = -math.log(b)
    if eps_n(spec, math.nextafter(b, 0.0), params) >= level:
        return u_lo
    step = 1.0
    u_hi = u_lo + step
    while eps_n(spec, 0.0, params, log_inv_delta=u_hi) < level:
        u_lo = u_hi
        step *= 2.0
        u_hi = u_lo + step
        if u_hi > LOG_MAX:
            return math.inf
    # eps_n(u_lo) < level <= eps_n(u_hi); the supremum sits at the smallest feasible u
    while u_hi - u_lo > LOG_TOL * u_hi:
        mid = 0.5 * (u_lo + u_hi)
        if eps_n(spec, 0.0, params, log_inv_delta=mid) >= level:
            u_hi = mid
        else:
            u_lo = mid
    return u_hi


def delta_hat(profile: MarginProfile, spec: WeightSpectrum, params: DeltaBoundParams) -> float:
    """``delta_hat_n(f)``; may underflow to 0 for extremely small supremums."""
    return math.exp(-log_inv_delta_hat(profile, spec, params))


def bound_args(u: float) -> tuple[float, float | None]:
    """``(delta, log_inv_delta)`` for the bound functions at ``log(1/delta) = u``.

    Uses the plain ``delta`` whenever it is a normal double, so results match
    calls made with ``delta_hat`` directly.
    """
    delta = math.exp(-u)
    if delta >= 1e-300:
        return delta, None
    return 0.0, u


def delta_bound(profile: MarginProfile, spec: WeightSpectrum, params: DeltaBoundParams) -> float:
    """``eps_n(f; delta_hat)``, or ``inf`` when no supremum was found."""
    u = log_inv_delta_hat(profile, spec, params)
    if math.isinf(u):
        return math.inf
    delta, log_inv = bound_args(u)
    return eps_n(spec, delta, params, log_inv)


def weighted_eps(spec: WeightSpectrum, delta: float, params: DeltaBoundParams,
                 normalize: bool = False, log_inv_delta: float | None = None) -> float:
    """``K inf_Delta [zeta * dimension term + (1 - zeta) * margin term]``, no floor.

    With ``normalize`` the leading ``d`` of the dimension term becomes
    ``d / T``; the ``d`` inside the logarithm is kept.
    """
    u = _log_inv(delta, log_inv_delta)
    d, Delta = _candidates(spec)
    dim = _dimension_term(d, params.n, u)
    if normalize:
        dim = dim / params.T
    obj = params.zeta * dim + (1.0 - params.zeta) * _margin_term(Delta, delta, params, log_inv_delta)
    return float(params.K * obj.min())


def normalized_eps(spec: WeightSpectrum, delta: float, params: DeltaBoundParams,
                   log_inv_delta: float | None = None) -> float:
    return weighted_eps(spec, delta, params, normalize=True, log_inv_delta=log_inv_delta)
