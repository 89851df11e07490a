"""Full coloring pipelines for arbitrary convex bodies.

Two routes produce a sign vector chi with V chi - t inside a body K of
Gaussian measure at least 1/2, both built on the recentering procedure:

* ``color_asymmetric``    recenters, symmetrizes the recentred slice, scales
  body and face jointly by alpha = 4 (1 + pi sqrt(8 ln 2)) and hands the
  symmetric problem to a pluggable symmetric-body strategy (e.g. the random
  walk sampler).  The returned vertex is accepted only after the membership
  oracle and the vertex test both pass, so the output is self-certifying.

* ``color_body_centric``  recenters, scales by beta = 1 + pi sqrt(8 ln 2)
  + 4 pi sqrt(ln 2) (which pushes the measure to 3/4), then alternates
  recentering with descent to the facet nearest the origin until the face is
  a vertex.  All randomness sits in the barycenter estimates, so a fixed seed
  makes the output fully deterministic.

Both pipelines work in nested orthonormal frames: after each face descent the
remaining problem is re-expressed in coordinates of the face span, where the
restricted Gaussian is again standard.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from scipy.special import ndtri

from .bodies import (
    ConvexBody,
    gaussian_measure,
    restrict,
    scaled,
    symmetrize,
    symmetry_spot_check,
)
from .errors import ContractViolation, PreconditionError, RestartBudgetError
from .recenter import RecenterResult, recenter
from .seeding import child_seed
from .zonotope import (
    FaceState,
    FractionalColoring,
    VectorSystem,
    descend_face,
    dual_basis,
    min_norm_boundary_point,
    reduce_to_independent,
)

_F2 = 1e-12


@dataclass(frozen=True)
class AsymPipelineConfig:
    """Constants of the asymmetric-to-symmetric reduction.

    alpha and delta_rc are recomputed from their defining formulas at
    construction; they are not tunables.
    """

    alpha: float = 4.0 * (1.0 + math.pi * math.sqrt(8.0 * math.log(2.0)))
    delta_rc: float = 1.0 / (32.0 * math.sqrt(2.0 * math.pi))
    epsilon_rc: float = 0.25
    max_outer_restarts: int = 64
    seed: object = 0
    beta_paouris: float = 3.0
    measure_samples: int = 200_000

    def validate(self) -> None:
        if abs(self.alpha - 4.0 * (1.0 + math.pi * math.sqrt(8.0 * math.log(2.0)))) > _F2:
            raise ContractViolation("alpha deviates from its formula")
        if abs(self.delta_rc - 1.0 / (32.0 * math.sqrt(2.0 * math.pi))) > _F2:
            raise ContractViolation("delta_rc deviates from its formula")


@dataclass(frozen=True)
class BodyCentricConfig:
    """Constants of the deterministic body-centric pipeline for n vectors."""

    n: int
    v0: float = 0.1
    eta0: float = field(default=0.0)
    c0: float = field(default=0.0)
    beta: float = field(default=0.0)
    alpha_n: float = field(default=0.0)
    eta_n: float = field(default=0.0)
    epsilon_rc: float = field(default=0.0)
    seed: object = 0
    max_outer_restarts: int = 64
    beta_paouris: float = 3.0
    measure_samples: int = 200_000

    def __post_init__(self):
        c0 = 1.0 / float(ndtri(0.6))
        object.__setattr__(self, "c0", c0)
        if self.eta0 == 0.0:
            object.__setattr__(self, "eta0", 1.0 / (10.0 * c0))
        object.__setattr__(
            self, "beta",
            1.0 + math.pi * math.sqrt(8.0 * math.log(2.0)) + 4.0 * math.pi * math.sqrt(math.log(2.0)),
        )
        object.__setattr__(
            self, "alpha_n",
            min(self.v0, 1.0 / (10.0 * math.sqrt(math.log(2.0 * self.n)))),
        )
        object.__setattr__(
            self, "eta_n",
            min(self.eta0, 1.0 / (32.0 * math.sqrt(2.0 * math.pi)), 1.0 / (14.0 * c0 * self.n)),
        )
        object.__setattr__(self, "epsilon_rc", 1.0 / (2.0 * (self.n + 1.0)))

    def validate(self) -> None:
        if abs(self.c0 - 1.0 / float(ndtri(0.6))) > _F2:
            raise ContractViolation("c0 deviates from its formula")
        beta = 1.0 + math.pi * math.sqrt(8.0 * math.log(2.0)) + 4.0 * math.pi * math.sqrt(math.log(2.0))
        if abs(self.beta - beta) > _F2:
            raise ContractViolation("beta deviates from its formula")


# ---------------------------------------------------------------------------
# frame bookkeeping


@dataclass
class _Frame:
    """Nested orthonormal coordinates for the remaining active columns."""

    sys: VectorSystem        # system in frame coordinates (ambient dim = n active)
    body: ConvexBody         # body in frame coordinates
    to_top: np.ndarray       # frame coords -> top-frame coords (k_top x k)
    origin_top: np.ndarray   # frame origin in top-frame coords
    idx: np.ndarray          # original column index per frame column

    @property
    def dim(self) -> int:
        return self.sys.m


def _absorb_fixed(chi: np.ndarray, face: FaceState, idx: np.ndarray) -> None:
    """Copy the face's fixed signs into chi via the index map."""
    for j, sign in face.fixed_signs.items():
        orig = int(idx[j])
        if not np.isnan(chi[orig]) and chi[orig] != sign:
            raise ContractViolation("conflicting sign assignments")
        chi[orig] = sign


def _descend_frame(frame: _Frame, face: FaceState) -> _Frame:
    """Re-express the problem inside the minimal face containing face.q."""
    sub_sys = VectorSystem(
        face.basis.T @ frame.sys.V[:, face.active],
        face.fractional_coords(frame.sys),
    )
    sub_body = restrict(frame.body, face.basis, face.q)
    return _Frame(
        sys=sub_sys,
        body=sub_body,
        to_top=frame.to_top @ face.basis,
        origin_top=frame.origin_top + frame.to_top @ face.q,
        idx=frame.idx[face.active],
    )


def _vertex_check(sys: VectorSystem, chi: np.ndarray, point: np.ndarray, tol: float = 1e-8) -> None:
    """Verify chi is a full sign vector whose vertex equals ``point``.

    Dual coordinates are taken over the independent stage-zero support, which
    is the meaningful vertex test when the full system has dependent columns.
    """
    if np.any(np.isnan(chi)) or np.any(np.abs(np.abs(chi) - 1.0) > 0):
        raise ContractViolation("coloring has non-sign entries")
    resid = sys.V @ chi - sys.t - point
    if np.linalg.norm(resid) > tol * (1.0 + np.linalg.norm(point)):
        raise ContractViolation("accumulated point disagrees with the coloring vertex")
    x0 = reduce_to_independent(sys)
    act = x0.active
    if act.size == 0:
        return
    duals = dual_basis(sys.V[:, act])
    rest = np.setdiff1d(np.arange(sys.n), act)
    t_bar = point + sys.t - (sys.V[:, rest] @ chi[rest] if rest.size else 0.0)
    z = duals.T @ t_bar
    if np.any(np.abs(np.abs(z) - 1.0) > tol):
        raise ContractViolation("point is not a vertex of the parallelepiped")


# ---------------------------------------------------------------------------
# asymmetric reduction pipeline


@dataclass
class AsymReport:
    chi: np.ndarray
    point: np.ndarray
    attempts: int
    recenter_fails: int
    strategy_rejects: int
    recenter: RecenterResult | None
    measure_estimate: object
    residual_l2: float
    residual_linf: float


def color_asymmetric(
    body: ConvexBody,
    sys: VectorSystem,
    strategy,
    cfg: AsymPipelineConfig | None = None,
):
    """Color an arbitrary body by reduction to a symmetric-body strategy.

    Loop: recenter with (delta_rc, epsilon_rc); run the strategy on the
    alpha-scaled face against the alpha-scaled symmetrized slice; lift the
    returned vertex and accept only if it passes the membership oracle and
    the vertex test.  Every accepted output is therefore certified.
    """
    cfg = cfg or AsymPipelineConfig()
    cfg.validate()
    if body.dim != sys.m:
        raise PreconditionError("body and system dimensions differ")

    side = 2.0 * float(np.max(sys.column_norms(), initial=0.0))
    allowed = strategy.side_length_bound(sys.n) / cfg.alpha
    if side > allowed + 1e-12:
        raise PreconditionError(
            f"side length {side:.6g} exceeds the strategy bound {allowed:.6g}"
        )
    measure_est = gaussian_measure(body, cfg.measure_samples, child_seed(cfg.seed, 90))
    if measure_est.p_hat < 0.5 - 3.0 * measure_est.ci_halfwidth:
        warnings.warn(
            f"body measure estimate {measure_est.p_hat:.4f} is below 1/2; "
            "the pipeline may fail persistently",
            RuntimeWarning,
            stacklevel=2,
        )

    recenter_fails = 0
    strategy_rejects = 0
    for attempt in range(cfg.max_outer_restarts):
        rc = recenter(
            body, sys, cfg.delta_rc, cfg.epsilon_rc, child_seed(cfg.seed, 10, attempt),
            beta_paouris=cfg.beta_paouris, measure_samples=cfg.measure_samples,
        )
        if not rc.ok:
            recenter_fails += 1
            continue
        chi = np.full(sys.n, np.nan)
        _absorb_fixed(chi, rc.face, np.arange(sys.n))

        if rc.face.dim == 0:
            candidate = rc.face.q
        else:
            B = rc.face.basis
            act = rc.face.active
            slice_body = scaled(symmetrize(restrict(body, B, rc.face.q)), cfg.alpha)
            if not symmetry_spot_check(slice_body, seed=child_seed(cfg.seed, 11, attempt)):
                raise ContractViolation("symmetrized slice failed the symmetry spot check")
            face_sys = VectorSystem(
                cfg.alpha * (B.T @ sys.V[:, act]),
                rc.face.fractional_coords(sys),
            )
            z = strategy.sample(face_sys, slice_body, child_seed(cfg.seed, 12, attempt))
            vertex_w = face_sys.V @ z - face_sys.t
            candidate = rc.face.q + B @ (vertex_w / cfg.alpha)
            chi[act] = z

        ok = bool(body.contains(candidate))
        if ok:
            try:
                _vertex_check(sys, chi, candidate)
            except ContractViolation:
                ok = False
        if not ok:
            strategy_rejects += 1
            continue
        resid = sys.V @ chi - sys.t
        report = AsymReport(
            chi=chi,
            point=candidate,
            attempts=attempt + 1,
            recenter_fails=recenter_fails,
            strategy_rejects=strategy_rejects,
            recenter=rc,
            measure_estimate=measure_est,
            residual_l2=float(np.linalg.norm(resid)),
            residual_linf=float(np.max(np.abs(resid), initial=0.0)),
        )
        return chi, report
    raise RestartBudgetError(
        f"asymmetric pipeline failed {cfg.max_outer_restarts} attempts "
        f"(recenter fails: {recenter_fails}, strategy rejects: {strategy_rejects})"
    )


# ---------------------------------------------------------------------------
# body-centric pipeline


@dataclass
class BodyCentricTrace:
    chi: np.ndarray
    point: np.ndarray
    attempts: int
    descents: int
    dims: list
    recenter_fails: int
    barycenter_norms: list
    residual_l2: float
    residual_linf: float


def color_body_centric(
    body: ConvexBody,
    sys: VectorSystem,
    cfg: BodyCentricConfig | None = None,
):
    """Deterministic coloring by repeated recentering plus nearest-facet descent."""
    cfg = cfg or BodyCentricConfig(n=sys.n)
    cfg.validate()
    if cfg.n != sys.n:
        raise PreconditionError("config was built for a different number of vectors")
    if body.dim != sys.m:
        raise PreconditionError("body and system dimensions differ")
    side = 2.0 * float(np.max(sys.column_norms(), initial=0.0))
    if side > 2.0 * cfg.alpha_n + 1e-12:
        raise PreconditionError(
            f"side length {side:.6g} exceeds the bound {2.0 * cfg.alpha_n:.6g}"
        )

    recenter_fails = 0
    for attempt in range(cfg.max_outer_restarts):
        out = _body_centric_attempt(body, sys, cfg, attempt)
        if out is None:
            recenter_fails += 1
            continue
        chi, candidate, descents, dims, b_norms = out
        resid = sys.V @ chi - sys.t
        trace = BodyCentricTrace(
            chi=chi,
            point=candidate,
            attempts=attempt + 1,
            descents=descents,
            dims=dims,
            recenter_fails=recenter_fails,
            barycenter_norms=b_norms,
            residual_l2=float(np.linalg.norm(resid)),
            residual_linf=float(np.max(np.abs(resid), initial=0.0)),
        )
        return chi, trace
    raise RestartBudgetError(
        f"body-centric pipeline failed {cfg.max_outer_restarts} attempts "
        f"(recenter fails: {recenter_fails})"
    )


def _body_centric_attempt(body: ConvexBody, sys: VectorSystem, cfg: BodyCentricConfig, attempt: int):
    chi = np.full(sys.n, np.nan)
    descents = 0
    dims = []
    b_norms = []

    rc1 = recenter(
        body, sys, cfg.eta_n, cfg.epsilon_rc, child_seed(cfg.seed, 20, attempt),
        beta_paouris=cfg.beta_paouris, measure_samples=cfg.measure_samples,
    )
    if not rc1.ok:
        return None
    descents += rc1.descents
    b_norms.append(rc1.barycenter_norm)
    _absorb_fixed(chi, rc1.face, np.arange(sys.n))
    q = rc1.face.q
    B1 = rc1.face.basis
    dims.append(rc1.face.dim)

    if rc1.face.dim == 0:
        candidate = q
    else:
        # scale the recentred pair by beta (measure rises to >= 3/4) and walk
        # the scaled copy down to a vertex
        frame = _Frame(
            sys=VectorSystem(
                cfg.beta * (B1.T @ sys.V[:, rc1.face.active]),
                rc1.face.fractional_coords(sys),
            ),
            body=scaled(restrict(body, B1, q), cfg.beta),
            to_top=np.eye(rc1.face.dim),
            origin_top=np.zeros(rc1.face.dim),
            idx=rc1.face.active.copy(),
        )
        loop = 0
        while frame.dim > 0:
            loop += 1
            if loop > sys.n + 1:
                raise ContractViolation("body-centric loop exceeded its dimension budget")
            rc2 = recenter(
                frame.body, frame.sys, cfg.eta_n, cfg.epsilon_rc,
                child_seed(cfg.seed, 21, attempt, loop),
                beta_paouris=cfg.beta_paouris, measure_samples=cfg.measure_samples,
            )
            if not rc2.ok:
                return None
            descents += rc2.descents
            b_norms.append(rc2.barycenter_norm)
            _absorb_fixed(chi, rc2.face, frame.idx)
            frame = _descend_frame(frame, rc2.face)
            dims.append(frame.dim)
            if frame.dim == 0:
                break
            face = FaceState.from_coloring(frame.sys, FractionalColoring(frame.sys.lam))
            s, _, _ = min_norm_boundary_point(face, frame.sys)
            after = descend_face(face, frame.sys, s)
            descents += 1
            _absorb_fixed(chi, after, frame.idx)
            frame = _descend_frame(frame, after)
            dims.append(frame.dim)
        candidate = q + B1 @ (frame.origin_top / cfg.beta)

    if not bool(body.contains(candidate)):
        return None
    try:
        _vertex_check(sys, chi, candidate)
    except ContractViolation:
        return None
    return chi, candidate, descents, dims, b_norms
