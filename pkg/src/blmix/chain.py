"""Exact transition kernel of the two-urn ball-swap chain.

Single-step rows, the stationary law, distance-to-stationarity profiles and
mixing-time extraction, the polynomial eigenfunctions with their closed-form
moment identities, and the moment-based lower-bound certificate.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import pmf as _pmf
from .errors import HorizonExceededError, InfeasibleSizeError, ParameterError
from .pmf import FinitePmf, HypergeomParams, difference_law, hypergeom_pmf, point_mass, tv_distance

MATRIX_GUARD = 4096      # refuse full (n+1)^2 kernel materialization above this
VECTOR_GUARD = 100_000   # refuse single-start evolution above this
MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class ChainParams:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be positive")
        if not 0 <= self.k <= self.n:
            raise ParameterError("k must lie in [0, n]")

    def assumption_ok(self, delta: float) -> bool:
        """Whether k/n lies in the open band (0, delta), delta in (0, 1/2)."""
        if not 0 < delta < 0.5:
            raise ParameterError("delta must lie in (0, 1/2)")
        return 0 < self.k / self.n < delta


class StartPolicy(enum.Enum):
    ALL_STATES = "all_states"
    STATE_ZERO = "state_zero"


class Eigenfunction(enum.Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"


@dataclass(frozen=True)
class MixingProfile:
    params: ChainParams
    start_policy: StartPolicy
    d_values: np.ndarray
    lost_mass: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.d_values, dtype=np.float64)
        object.__setattr__(self, "d_values", d)
        if np.any(d < -MONOTONE_TOL) or np.any(d > 1 + MONOTONE_TOL):
            raise ParameterError("distance values must lie in [0, 1]")
        if np.any(np.diff(d) > MONOTONE_TOL):
            raise ParameterError("distance profile must be non-increasing")
        d.setflags(write=False)


@dataclass(frozen=True)
class MomentReport:
    t: int
    lhs: float
    rhs: float

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_err(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.abs_err / scale if scale > 0 else 0.0


@functools.lru_cache(maxsize=200_000)
def _row_cached(n: int, k: int, x: int, trim: bool) -> FinitePmf:
    added = hypergeom_pmf(HypergeomParams(n, n - x, k))
    removed = hypergeom_pmf(HypergeomParams(n, x, k))
    row = difference_law(added, removed).shifted(x)
    if row.lo < 0 or row.hi > n:
        raise AssertionError("transition row escaped the state space")
    return row.truncated() if trim else row


def transition_row(params: ChainParams, x: int, trim: bool = False) -> FinitePmf:
    """Law of the next state from ``x``: x plus incoming-red minus
    outgoing-red counts, both hypergeometric over the k swapped balls."""
    if not 0 <= x <= params.n:
        raise ParameterError(f"state {x} outside [0, {params.n}]")
    return _row_cached(params.n, params.k, int(x), trim)


def stationary(params: ChainParams) -> FinitePmf:
    """The unique invariant law: hypergeometric counts of red balls when the
    2n balls are split evenly at random."""
    n = params.n
    return hypergeom_pmf(HypergeomParams(2 * n, n, n))


def evolve(params: ChainParams, mu: FinitePmf, steps: int,
           trim: bool = False) -> FinitePmf:
    """Push ``mu`` through the kernel ``steps`` times, accumulating any
    truncation losses from the rows used."""
    if mu.lo < 0 or mu.hi > params.n:
        raise ParameterError("distribution leaves the state space")
    if steps < 0:
        raise ParameterError("steps must be nonnegative")
    n = params.n
    out = mu
    for _ in range(steps):
        dense = np.zeros(n + 1)
        lost = out.lost_mass
        for x, wx in zip(out.support, out.weights):
            if wx == 0.0:
                continue
            row = transition_row(params, int(x), trim)
            dense[row.lo:row.hi + 1] += wx * row.weights
            lost += wx * row.lost_mass
        out = _pmf.from_weights(0, dense, lost_mass=min(lost, 1.0))
    return out


def _kernel_matrix(params: ChainParams) -> np.ndarray:
    n = params.n
    if n > MATRIX_GUARD:
        raise InfeasibleSizeError(
            f"full kernel materialization refused for n={n} > {MATRIX_GUARD}")
    P = np.zeros((n + 1, n + 1))
    for x in range(n + 1):
        row = transition_row(params, x)
        P[x, row.lo:row.hi + 1] = row.weights
    return P


def distance_profile(params: ChainParams, t_max: int,
                     start_policy: StartPolicy = StartPolicy.ALL_STATES) -> MixingProfile:
    """Worst-case (or from-zero) total variation to stationarity for
    t = 0..t_max."""
    if t_max < 0:
        raise ParameterError("t_max must be nonnegative")
    n = params.n
    pi = stationary(params)
    d = np.empty(t_max + 1)
    lost = 0.0
    if start_policy is StartPolicy.ALL_STATES:
        pi_dense = pi.dense_on(0, n)
        P = _kernel_matrix(params)
        D = np.eye(n + 1)
        for t in range(t_max + 1):
            d[t] = 0.5 * np.abs(D - pi_dense).sum(axis=1).max()
            if t < t_max:
                D = D @ P
    else:
        if n > VECTOR_GUARD:
            raise InfeasibleSizeError(
                f"single-start evolution refused for n={n} > {VECTOR_GUARD}")
        trim = n > MATRIX_GUARD
        mu = point_mass(0)
        for t in range(t_max + 1):
            d[t] = min(1.0, tv_distance(mu, pi) + mu.lost_mass)
            if t < t_max:
                mu = evolve(params, mu, 1, trim=trim)
        lost = mu.lost_mass
    if np.any(np.diff(d) > MONOTONE_TOL):
        raise AssertionError("distance profile increased beyond tolerance")
    np.minimum.accumulate(d, out=d)  # clean sub-tolerance rounding jitter
    return MixingProfile(params, start_policy, d, lost)


def t_mix(profile: MixingProfile, epsilon: float) -> int:
    """Smallest t in the profile with d(t) <= epsilon."""
    if not 0 < epsilon:
        raise ParameterError("epsilon must be positive")
    if epsilon >= 1:
        return 0
    hits = np.nonzero(profile.d_values <= epsilon)[0]
    if hits.size == 0:
        raise HorizonExceededError(epsilon, float(profile.d_values[-1]),
                                   len(profile.d_values) - 1)
    return int(hits[0])


def eigen_eval(params: ChainParams, kind: Eigenfunction, x: float) -> float:
    n = params.n
    if not 0 <= x <= n:
        raise ParameterError(f"argument {x} outside [0, {n}]")
    if kind is Eigenfunction.F1:
        return 1.0 - 2.0 * x / n
    if kind is Eigenfunction.F2:
        if n < 2:
            raise ParameterError("the quadratic eigenfunction requires n >= 2")
        return (1.0 - 2.0 * (2 * n - 1) * x / n**2
                + 2.0 * (2 * n - 1) * x * (x - 1) / (n**2 * (n - 1)))
    if kind is Eigenfunction.F3:
        return 1.0 - 2.0 * x * (n - x) / n**2
    raise ParameterError(f"unknown eigenfunction kind {kind!r}")


def verify_moment_identities(params: ChainParams, x0: int, t: int
                             ) -> tuple[MomentReport, MomentReport]:
    """Compare exact-evolution first and second moments of the linear
    eigenfunction against their closed forms."""
    n, k = params.n, params.k
    mu_t = evolve(params, point_mass(x0), t)
    f1_vals = 1.0 - 2.0 * mu_t.support / n
    lhs1 = float(np.dot(mu_t.weights, f1_vals))
    lhs2 = float(np.dot(mu_t.weights, f1_vals**2))
    f1k = eigen_eval(params, Eigenfunction.F1, k)
    rhs1 = f1k**t * eigen_eval(params, Eigenfunction.F1, x0)
    f2k = eigen_eval(params, Eigenfunction.F2, k)
    rhs2 = (1.0 / (2 * n - 1)
            + (2 * n - 2) / (2 * n - 1) * f2k**t
            * eigen_eval(params, Eigenfunction.F2, x0))
    return MomentReport(t, lhs1, rhs1), MomentReport(t, lhs2, rhs2)


def lower_bound_certificate(params: ChainParams, t: int) -> float:
    """Certified lower bound on the TV distance from state 0 at time t.

    Uses the exact closed-form moments of f = sqrt(n-1) * (linear
    eigenfunction): the stationary law concentrates f near 0 while the
    from-zero law concentrates it near its (large) mean, and Chebyshev on
    both sides certifies 1 - var_pi/alpha^2 - 1/r^2 whenever the two
    concentration sets are disjoint (|mean| - r*sd > alpha).
    """
    if t < 0:
        raise ParameterError("t must be nonnegative")
    n, k = params.n, params.k
    if n < 2:
        return 0.0
    f1k = eigen_eval(params, Eigenfunction.F1, k)
    f2k = eigen_eval(params, Eigenfunction.F2, k)
    scale = math.sqrt(n - 1)
    m = abs(scale * f1k**t)  # f evaluates to sqrt(n-1) at state 0
    second = (n - 1) * (1.0 / (2 * n - 1) + (2 * n - 2) / (2 * n - 1) * f2k**t)
    v0 = max(second - (scale * f1k**t) ** 2, 0.0)
    v_pi = (n - 1) / (2 * n - 1)
    best = 0.0
    sd = math.sqrt(v0)
    for ja in range(21):
        alpha = float(1 << ja)
        for jr in range(21):
            r = float(1 << jr)
            if m - r * sd > alpha:
                best = max(best, 1.0 - v_pi / alpha**2 - 1.0 / r**2)
    return min(max(best, 0.0), 1.0)
