"""Measure recentering: shift the body/parallelepiped pair toward the
restricted body's barycenter until the barycenter is small, descending to
lower-dimensional faces whenever the move leaves the parallelepiped.

Moving the origin to the barycenter of K - q is exact gradient ascent on the
logconcave objective log gamma((K - q) n W): a full step never decreases the
measure, and a partial step that stops on the boundary of P descends to a
facet whose central slice again cannot lose measure.  The loop therefore runs
at most N = ceil(24 / delta^2) + n iterations before the measure would exceed
one, which is the FAIL budget.

Each iteration estimates the barycenter of the current slice to accuracy
delta / 6 with failure probability epsilon / N, splitting the caller's
epsilon evenly across the worst-case number of calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, MeasureEstimate, barycenter, gaussian_measure, restrict
from .errors import PreconditionError
from .seeding import child_seed
from .zonotope import FaceState, VectorSystem, descend_face, ray_exit, reduce_to_independent


@dataclass
class RecenterResult:
    q: np.ndarray
    face: FaceState
    iterations: int
    measure_before: MeasureEstimate
    measure_after: MeasureEstimate | None
    barycenter_norm: float
    status: str  # "ok" | "fail"
    fail_reason: str | None = None
    descents: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def recenter(
    body: ConvexBody,
    sys: VectorSystem,
    delta: float,
    epsilon: float,
    seed=0,
    *,
    beta_paouris: float = 3.0,
    measure_samples: int = 200_000,
) -> RecenterResult:
    """Find q in P n K whose restricted body has barycenter norm <= delta.

    Returns status "fail" on the algorithm's FAIL branches (0 outside K, a
    barycenter estimate outside the restricted body, or loop exhaustion); on
    valid inputs of measure >= 1/2 the success probability is >= 1 - epsilon,
    and then the restricted measure is no smaller than the original (a
    statistical property, checked by the caller, not asserted here).
    """
    if delta <= 0 or not (0.0 < epsilon < 1.0):
        raise PreconditionError("need delta > 0 and epsilon in (0, 1)")
    if body.dim != sys.m:
        raise PreconditionError("body dimension must match the system's ambient dimension")

    measure_before = gaussian_measure(body, measure_samples, child_seed(seed, 1))
    face = FaceState.from_coloring(sys, reduce_to_independent(sys))
    descents = 0

    def result(status, q, face, iters, b_norm, reason=None, measure_after=None):
        return RecenterResult(
            q=q,
            face=face,
            iterations=iters,
            measure_before=measure_before,
            measure_after=measure_after,
            barycenter_norm=b_norm,
            status=status,
            fail_reason=reason,
            descents=descents,
        )

    # 0 in P holds by the certificate; FAIL immediately when the start point
    # (q = 0 after the independence reduction) lies outside K
    if not bool(body.contains(face.q)):
        return result("fail", face.q, face, 0, math.inf, reason="start point outside the body")

    N = math.ceil(24.0 / delta**2) + sys.n
    for it in range(1, N + 1):
        if face.dim == 0:
            ok = bool(body.contains(face.q))
            if not ok:
                return result("fail", face.q, face, it, math.inf, reason="vertex outside the body")
            measure_after = gaussian_measure(
                restrict(body, face.basis, face.q), measure_samples, child_seed(seed, 2)
            )
            return result("ok", face.q, face, it, 0.0, measure_after=measure_after)

        sliced = restrict(body, face.basis, face.q)
        est = barycenter(
            sliced, delta / 6.0, epsilon / N, child_seed(seed, 3, it),
            beta_paouris=beta_paouris,
        )
        b_prime = est.b_hat
        if not bool(sliced.contains(b_prime)):
            return result(
                "fail", face.q, face, it, float(np.linalg.norm(b_prime)),
                reason="barycenter estimate outside the restricted body",
            )
        b_norm = float(np.linalg.norm(b_prime))
        if b_norm <= delta / 2.0:
            if not bool(body.contains(face.q)):
                return result("fail", face.q, face, it, b_norm, reason="point left the body")
            measure_after = gaussian_measure(sliced, measure_samples, child_seed(seed, 2))
            return result("ok", face.q, face, it, b_norm, measure_after=measure_after)

        b_amb = face.basis @ b_prime
        lam, hit = ray_exit(face, sys, b_amb)
        step = (lam if hit else 1.0) * b_amb
        before_dim = face.dim
        face = descend_face(face, sys, step)
        if face.dim < before_dim:
            descents += 1

    return result("fail", face.q, face, N, math.inf, reason="iteration budget exhausted")
