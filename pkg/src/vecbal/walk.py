"""Subgaussian random-walk coloring sampler.

The walk drives a fractional coloring chi(t) in [-1,1]^n to a full sign
vector.  Each step adds gamma * U(t) r(t) with r(t) uniform in {-1,1}^n and
U(t) U(t)^T = Sigma(t), where Sigma(t) solves the diagonal-constrained PSD
program on the active columns (ones on the active diagonal, V Sigma V^T <= I).
Coordinates freeze once |chi_i| >= 1 - delta: their Sigma diagonal is zero,
so the corresponding rows of U are exactly zero and frozen coordinates never
move.  After T steps a fully frozen walk is rounded coordinate-wise to signs;
otherwise the attempt restarts with a fresh Philox stream (seed, attempt).

Parameter regimes:

* ``paper``     gamma = 2 log2(2n) / n^{5/2},
                delta = 2 sqrt(2 ln 2 log2(2n)) / n,
                T     = ceil(2 / gamma^2) * ceil(log2(2n)).
  These are asymptotic: for n < 8 one gets delta >= 1 and the walk trivially
  rounds its start point, so prefer practical mode at small n.
* ``practical`` delta = 0.1, gamma = min(delta / (2 sqrt(n)), 0.05),
                T = ceil(8 / gamma^2); keeps gamma sqrt(n) < delta < 1 so the
  boundedness argument still applies, only the proven subgaussian constant is
  not guaranteed.

Sigma(t) depends only on the active set, so factors are cached per active
set; ``sigma_recomputes`` reports the number of fresh solves.  Steps are
simulated in blocks (cut at the first freeze) which leaves the sampled
distribution unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, PreconditionError, RestartBudgetError
from .komlos import solve_komlos
from .seeding import child_seed, philox_from
from .zonotope import VectorSystem

_BLOCK = 256
PAPER = "paper"
PRACTICAL = "practical"


@dataclass(frozen=True)
class WalkParams:
    gamma: float
    delta: float
    T: int
    mode: str
    max_restarts: int = 64
    seed: object = 0

    def __post_init__(self):
        if self.mode not in (PAPER, PRACTICAL):
            raise PreconditionError(f"unknown walk mode {self.mode!r}")
        if self.gamma <= 0 or self.delta <= 0 or self.T < 0:
            raise PreconditionError("gamma, delta must be positive and T >= 0")

    def validate_for(self, n: int) -> None:
        if self.mode == PAPER:
            ref = walk_params(n, PAPER, seed=self.seed, max_restarts=self.max_restarts)
            if (self.gamma != ref.gamma) or (self.delta != ref.delta) or (self.T != ref.T):
                raise PreconditionError("paper-mode parameters must match the formulas exactly")
        else:
            if not (self.gamma * math.sqrt(n) < self.delta < 1.0):
                raise PreconditionError(
                    "practical mode needs gamma*sqrt(n) < delta < 1 so frozen "
                    "coordinates cannot escape [-1,1]"
                )


def walk_params(n: int, mode: str = PAPER, *, seed=0, max_restarts: int = 64) -> WalkParams:
    """Step size, freeze threshold and budget for an n-vector walk."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if mode == PAPER:
        log2_2n = math.log2(2 * n)
        gamma = 2.0 * log2_2n / n**2.5
        delta = 2.0 * math.sqrt(2.0 * math.log(2.0) * log2_2n) / n
        T = math.ceil(2.0 / gamma**2) * math.ceil(log2_2n)
    elif mode == PRACTICAL:
        delta = 0.1
        gamma = min(delta / (2.0 * math.sqrt(n)), 0.05)
        T = math.ceil(8.0 / gamma**2)
    else:
        raise PreconditionError(f"unknown walk mode {mode!r}")
    return WalkParams(gamma=gamma, delta=delta, T=T, mode=mode, max_restarts=max_restarts, seed=seed)


@dataclass
class WalkTrace:
    chi_final: np.ndarray
    steps_taken: int
    restarts: int
    sigma_recomputes: int
    residual: np.ndarray


@dataclass
class SigmaCache:
    """Cache of step factors keyed by (system, active mask).

    The step covariance depends only on the active set, so walks over the
    same system (including restarts and repeated runs) share solves.
    """

    factors: dict = field(default_factory=dict)
    misses: int = 0

    def factor(self, V: np.ndarray, active: np.ndarray) -> np.ndarray:
        key = (V.tobytes(), active.tobytes())
        U = self.factors.get(key)
        if U is None:
            alpha = active.astype(float)
            U = solve_komlos(V, alpha).U
            self.factors[key] = U
            self.misses += 1
        return U


def sample_coloring(sys: VectorSystem, params: WalkParams, cache: SigmaCache | None = None) -> WalkTrace:
    """Run the walk until all coordinates freeze; restart on the rare failure.

    Requires column norms at most 1.  The certificate lambda provides the
    start point chi(0) with V chi(0) = t; the initial active set already uses
    the freeze rule A = {i : |chi(0)_i| < 1 - delta} so that certificates with
    coordinates near +-1 keep the boundedness invariant.
    """
    norms = sys.column_norms()
    if np.any(norms > 1.0 + 1e-9):
        raise PreconditionError(f"walk requires unit-bounded columns, got {norms.max():.6g}")
    params.validate_for(sys.n)
    if cache is None:
        cache = SigmaCache()

    misses_before = cache.misses
    for attempt in range(params.max_restarts + 1):
        rng = philox_from(child_seed(params.seed, attempt))
        chi, steps = _run_attempt(sys, params, rng, cache)
        if chi is not None:
            rounded = np.where(chi >= 0.0, 1.0, -1.0)
            return WalkTrace(
                chi_final=rounded,
                steps_taken=steps,
                restarts=attempt,
                sigma_recomputes=cache.misses - misses_before,
                residual=sys.V @ rounded - sys.t,
            )
    raise RestartBudgetError(
        f"walk failed {params.max_restarts + 1} attempts; each succeeds with "
        "probability >= 1/2 on valid input, so this indicates a bad instance"
    )


@dataclass(frozen=True)
class WalkStrategy:
    """Symmetric-body coloring strategy backed by the walk sampler.

    The sampler is universal (the body argument is ignored): by
    subgaussianity its output lands in any symmetric body of Gaussian
    measure >= 1/2 with constant probability once the declared side-length
    bound 2 c / sqrt(ln n) holds.  Acceptance is checked by the caller.
    """

    c: float = 1.0
    mode: str = PRACTICAL
    max_restarts: int = 64

    def side_length_bound(self, n: int) -> float:
        return 2.0 * self.c / math.sqrt(math.log(max(n, 2)))

    def sample(self, sys: VectorSystem, body, seed) -> np.ndarray:
        del body  # universal sampler
        params = walk_params(sys.n, self.mode, seed=seed, max_restarts=self.max_restarts)
        return sample_coloring(sys, params).chi_final


def _run_attempt(sys: VectorSystem, params: WalkParams, rng, cache: SigmaCache):
    n = sys.n
    gamma, delta, T = params.gamma, params.delta, params.T
    step_cap = gamma * math.sqrt(n) + 1e-12
    chi = sys.lam.astype(float).copy()
    active = np.abs(chi) < 1.0 - delta
    t = 0
    while t < T and active.any():
        U = cache.factor(sys.V, active)
        nsteps = min(_BLOCK, T - t)
        r = rng.integers(0, 2, size=(n, nsteps)).astype(float) * 2.0 - 1.0
        inc = gamma * (U @ r)
        if np.any(inc[~active, :]):
            raise ContractViolation("frozen coordinate received a nonzero increment")
        if float(np.abs(inc).max(initial=0.0)) > step_cap:
            raise ContractViolation("per-step increment exceeded gamma*sqrt(n)")
        traj = chi[:, None] + np.cumsum(inc, axis=1)
        crossings = (np.abs(traj) >= 1.0 - delta) & active[:, None]
        hit_cols = crossings.any(axis=0)
        if hit_cols.any():
            accept = int(np.argmax(hit_cols)) + 1
        else:
            accept = nsteps
        if float(np.abs(traj[:, :accept]).max()) > 1.0 + 1e-9:
            raise ContractViolation("walk left [-1, 1]")
        chi = traj[:, accept - 1].copy()
        t += accept
        if hit_cols.any():
            active = active & (np.abs(chi) < 1.0 - delta)
    if active.any() or (np.abs(chi) < 1.0 - delta).any():
        return None, t
    return chi, t
