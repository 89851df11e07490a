"""Membership-oracle convex bodies and their Gaussian-measure estimators.

Bodies are immutable wrappers around a vectorized membership predicate
(points are row vectors; a body of dimension d accepts an (N, d) array and
returns N booleans).  Composable constructors cover halfspaces, cubes, balls,
shifts, scalings, intersections, symmetrizations and subspace slices; slices
are how all lower-dimensional work happens, since the standard Gaussian is
rotation invariant and a slice through an orthonormal basis is again a
standard Gaussian problem in the slice coordinates.

Estimators are Monte-Carlo and pure given (inputs, seed):

* ``gaussian_measure``   fraction of standard normal draws inside the body,
  with a 95% normal-approximation confidence half-width;
* ``barycenter``         mean of the Gaussian restricted to the body, via
  rejection sampling: each of N points is the first of k standard normal
  draws landing inside, N = ceil((beta_P / delta)^2 * ln(e/eps)^2 * d) and
  k = ceil(log2(2 N / eps)).  The sample-size constant beta_P is a calibrated
  configuration value (default 3.0); it only scales the sample count.
* ``gauge_norm``         scaling inf {s >= 0 : x in s K} by doubling plus
  bisection along the ray, with an unbounded-direction flag when the ray
  never leaves the body.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import PreconditionError, RejectionExhaustedError
from .seeding import rng_from

_CHUNK = 1_000_000


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex set given by a pure, deterministic, vectorized membership test."""

    dim: int
    tag: str
    fn: Callable[[np.ndarray], np.ndarray]
    doc: dict | None = None  # JSON description when the body is serializable

    def contains(self, points: np.ndarray):
        """Membership of one point (shape (d,)) or a batch (shape (N, d))."""
        pts = np.asarray(points, dtype=float)
        if self.dim == 0:
            # zero-dimensional slice: the only point is the empty vector
            if pts.ndim <= 1:
                return bool(self.fn(np.zeros((1, 0)))[0])
            return self.fn(np.zeros((pts.shape[0], 0)))
        if pts.ndim == 1:
            if pts.shape != (self.dim,):
                raise PreconditionError(f"point has dimension {pts.shape}, body has {self.dim}")
            return bool(self.fn(pts[None, :])[0])
        if pts.shape[1] != self.dim:
            raise PreconditionError(f"points have dimension {pts.shape[1]}, body has {self.dim}")
        return self.fn(pts)


# ---------------------------------------------------------------------------
# constructors


def halfspace(normal, offset: float) -> ConvexBody:
    """{x : <normal, x> <= offset}."""
    a = np.asarray(normal, dtype=float)
    b = float(offset)
    doc = {"type": "halfspace", "normal": [float(v) for v in a], "offset": b}
    return ConvexBody(a.size, "halfspace", lambda p: p @ a <= b, doc)


def ball(radius: float, center=None, dim: int | None = None) -> ConvexBody:
    r = float(radius)
    if center is None:
        if dim is None:
            raise PreconditionError("ball needs a center or an explicit dimension")
        c = np.zeros(dim)
    else:
        c = np.asarray(center, dtype=float)
    doc = {"type": "ball", "center": [float(v) for v in c], "radius": r}
    return ConvexBody(
        c.size, "ball", lambda p: np.einsum("ij,ij->i", p - c, p - c) <= r * r, doc
    )


def cube(scale: float, dim: int, shift=None) -> ConvexBody:
    """shift + [-scale, scale]^dim."""
    a = float(scale)
    if shift is None:
        s = np.zeros(dim)
    else:
        s = np.asarray(shift, dtype=float)
        if s.size != dim:
            raise PreconditionError("cube shift dimension mismatch")
    doc = {"type": "cube", "dim": int(dim), "scale": a, "shift": [float(v) for v in s]}
    return ConvexBody(dim, "cube", lambda p: (np.abs(p - s) <= a).all(axis=1), doc)


def whole_space(dim: int) -> ConvexBody:
    return ConvexBody(dim, "space", lambda p: np.ones(p.shape[0], dtype=bool))


def _child_docs(bodies):
    docs = [b.doc for b in bodies]
    return None if any(d is None for d in docs) else docs


def intersect(*bodies: ConvexBody) -> ConvexBody:
    if not bodies:
        raise PreconditionError("intersection of nothing")
    d = bodies[0].dim
    if any(b.dim != d for b in bodies):
        raise PreconditionError("intersection requires equal dimensions")

    def fn(p, _bodies=bodies):
        out = _bodies[0].fn(p)
        for b in _bodies[1:]:
            out = out & b.fn(p)
        return out

    docs = _child_docs(bodies)
    doc = {"type": "intersection", "children": docs} if docs is not None else None
    return ConvexBody(d, "intersection", fn, doc)


def shifted(body: ConvexBody, offset) -> ConvexBody:
    """Translate: membership(x) = body(x - offset), i.e. body + offset."""
    v = np.asarray(offset, dtype=float)
    if v.size != body.dim:
        raise PreconditionError("shift dimension mismatch")
    doc = None
    if body.doc is not None:
        doc = {"type": "shifted", "offset": [float(x) for x in v], "children": [body.doc]}
    return ConvexBody(body.dim, "shifted", lambda p: body.fn(p - v), doc)


def scaled(body: ConvexBody, factor: float) -> ConvexBody:
    c = float(factor)
    if c <= 0:
        raise PreconditionError("scaling factor must be positive")
    doc = None
    if body.doc is not None:
        doc = {"type": "scaled", "factor": c, "children": [body.doc]}
    return ConvexBody(body.dim, "scaled", lambda p: body.fn(p / c), doc)


def symmetrize(body: ConvexBody) -> ConvexBody:
    """The symmetric body K n -K: membership(x) = body(x) and body(-x)."""
    doc = None
    if body.doc is not None:
        doc = {"type": "symmetrized", "children": [body.doc]}
    return ConvexBody(body.dim, "symmetrized", lambda p: body.fn(p) & body.fn(-p), doc)


def restrict(body: ConvexBody, basis: np.ndarray, shift) -> ConvexBody:
    """Slice through shift + span(basis), expressed in basis coordinates."""
    B = np.asarray(basis, dtype=float)
    p0 = np.asarray(shift, dtype=float)
    if B.ndim != 2 or B.shape[0] != body.dim or p0.shape != (body.dim,):
        raise PreconditionError("basis/shift shapes do not match the body dimension")
    k = B.shape[1]
    if k and np.max(np.abs(B.T @ B - np.eye(k))) > 1e-10:
        raise PreconditionError("slice basis must be orthonormal")
    return ConvexBody(k, "slice", lambda p: body.fn(p0 + p @ B.T))


def convexity_spot_check(body: ConvexBody, n_pairs: int = 1000, seed=0, scale: float = 1.0) -> bool:
    """Probabilistic validator: midpoints of random in-point pairs are in."""
    rng = rng_from(seed)
    pts = rng.standard_normal((8 * n_pairs, body.dim)) * scale
    inside = pts[body.contains(pts)]
    if inside.shape[0] < 2:
        return True
    half = inside.shape[0] // 2
    mids = 0.5 * (inside[:half] + inside[half:2 * half])
    return bool(np.all(body.contains(mids)))


def symmetry_spot_check(body: ConvexBody, n_probes: int = 1000, seed=0, scale: float = 1.0) -> bool:
    rng = rng_from(seed)
    pts = rng.standard_normal((n_probes, body.dim)) * scale
    return bool(np.all(body.contains(pts) == body.contains(-pts)))


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class MeasureEstimate:
    p_hat: float
    samples: int
    ci_halfwidth: float
    seed: int

    @property
    def interval(self):
        return (self.p_hat - self.ci_halfwidth, self.p_hat + self.ci_halfwidth)


def gaussian_measure(body: ConvexBody, n_samples: int, seed=0) -> MeasureEstimate:
    """Monte-Carlo standard-Gaussian measure with a 95% CI half-width."""
    if n_samples < 100:
        raise PreconditionError("need at least 100 samples")
    if body.dim == 0:
        p = 1.0 if body.contains(np.zeros(0)) else 0.0
        return MeasureEstimate(p, n_samples, 0.0, _seed_int(seed))
    rng = rng_from(seed)
    hits = 0
    done = 0
    while done < n_samples:
        take = min(_CHUNK, n_samples - done)
        pts = rng.standard_normal((take, body.dim))
        hits += int(np.count_nonzero(body.contains(pts)))
        done += take
    p_hat = hits / n_samples
    ci = 1.96 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n_samples)
    return MeasureEstimate(p_hat, n_samples, ci, _seed_int(seed))


def _seed_int(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return -1


@dataclass(frozen=True)
class BarycenterEstimate:
    b_hat: np.ndarray
    delta: float
    epsilon: float
    samples_used: int
    rejection_failures: int
    attempts_per_sample: int


def barycenter_sample_count(dim: int, delta: float, epsilon: float, beta_paouris: float) -> int:
    return math.ceil((beta_paouris / delta) ** 2 * math.log(math.e / epsilon) ** 2 * dim)


def barycenter(
    body: ConvexBody,
    delta: float,
    epsilon: float,
    seed=0,
    *,
    beta_paouris: float = 3.0,
) -> BarycenterEstimate:
    """Average of N Gaussian-restricted points, each found by rejection.

    Accuracy ||b_hat - b(K)||_2 <= delta holds with probability >= 1 - epsilon
    when the body has Gaussian measure at least 1/2 (caller's responsibility).
    A point that fails all its k attempts raises RejectionExhaustedError; on
    valid inputs that happens with probability at most epsilon.
    """
    if delta <= 0 or not (0.0 < epsilon < 1.0):
        raise PreconditionError("need delta > 0 and epsilon in (0, 1)")
    d = body.dim
    if d == 0:
        if not body.contains(np.zeros(0)):
            raise RejectionExhaustedError("zero-dimensional body does not contain its point")
        return BarycenterEstimate(np.zeros(0), delta, epsilon, 1, 0, 1)
    N = barycenter_sample_count(d, delta, epsilon, beta_paouris)
    k = math.ceil(math.log2(2.0 * N / epsilon))
    rng = rng_from(seed)

    # Consuming one Gaussian stream and keeping successive accepted draws is
    # distributed exactly as per-point rejection sampling; the per-point
    # failure event "all k attempts miss" is a run of k consecutive misses.
    total = np.zeros(d)
    rejected = 0
    remaining = N
    run = 0  # consecutive misses belonging to the currently pending point
    while remaining > 0:
        take = int(min(_CHUNK // max(d, 1) + 64, 2 * remaining + 64))
        pts = rng.standard_normal((take, d))
        ok = body.contains(pts)
        idx = np.flatnonzero(ok)
        n_take = min(idx.size, remaining)
        if n_take < remaining:
            # whole chunk consumed
            if idx.size == 0:
                run += take
                rejected += take
            else:
                if run + idx[0] >= k or (idx.size > 1 and int(np.diff(idx).max()) - 1 >= k):
                    raise RejectionExhaustedError(
                        f"a sample point missed the body {k} times in a row; "
                        "the body likely has Gaussian measure below 1/2"
                    )
                run = take - int(idx[-1]) - 1
                rejected += take - idx.size
            if run >= k:
                raise RejectionExhaustedError(
                    f"a sample point missed the body {k} times in a row; "
                    "the body likely has Gaussian measure below 1/2"
                )
            if n_take:
                total += pts[idx[:n_take]].sum(axis=0)
            remaining -= n_take
        else:
            # last needed acceptance sits inside this chunk; ignore the tail
            last = int(idx[remaining - 1])
            head = idx[:remaining]
            if run + head[0] >= k or (head.size > 1 and int(np.diff(head).max()) - 1 >= k):
                raise RejectionExhaustedError(
                    f"a sample point missed the body {k} times in a row; "
                    "the body likely has Gaussian measure below 1/2"
                )
            rejected += last + 1 - remaining
            total += pts[head].sum(axis=0)
            remaining = 0
    return BarycenterEstimate(total / N, delta, epsilon, N, rejected, k)


class GaugeResult(NamedTuple):
    value: float
    unbounded: bool


def gauge_norm(body: ConvexBody, x, tol: float = 1e-8) -> GaugeResult:
    """inf {s >= 0 : x in s K} for a 0-centered body, to relative accuracy tol.

    Returns (0, unbounded=True) when multiples of x stay inside past the
    doubling cap 2**64, the convention for recession directions.
    """
    x = np.asarray(x, dtype=float)
    probes = [np.zeros(body.dim)]
    for i in range(body.dim):
        e = np.zeros(body.dim)
        e[i] = tol
        probes.extend([e, -e])
    if not np.all(body.contains(np.asarray(probes))):
        raise PreconditionError("gauge requires 0 in the interior of the body")
    if not np.any(x):
        return GaugeResult(0.0, False)

    def inside(s: float) -> bool:
        return bool(body.contains(x / s))

    cap = 2.0**64
    if inside(1.0):
        hi = 1.0
        lo = 0.5
        while inside(lo):
            hi = lo
            lo *= 0.5
            if 1.0 / lo > cap:
                return GaugeResult(0.0, True)
    else:
        lo = 1.0
        hi = 2.0
        while not inside(hi):
            lo = hi
            hi *= 2.0
            if hi > cap:
                raise PreconditionError("no scaled copy of the body contains x; is 0 interior?")
    while hi - lo > tol * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return GaugeResult(hi, False)


# ---------------------------------------------------------------------------
# body files


def save_body(body: ConvexBody, path) -> None:
    if body.doc is None:
        raise PreconditionError(f"body with tag {body.tag!r} has no file representation")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body.doc, fh, sort_keys=True, separators=(",", ": "), indent=1)
        fh.write("\n")


def load_body(path) -> ConvexBody:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return body_from_doc(doc)


def body_from_doc(doc: dict) -> ConvexBody:
    kind = doc.get("type")
    if kind == "cube":
        return cube(doc["scale"], int(doc["dim"]), doc.get("shift"))
    if kind == "ball":
        return ball(doc["radius"], doc["center"])
    if kind == "halfspace":
        return halfspace(doc["normal"], doc["offset"])
    if kind == "intersection":
        return intersect(*(body_from_doc(c) for c in doc["children"]))
    if kind == "shifted":
        return shifted(body_from_doc(doc["children"][0]), doc["offset"])
    if kind == "scaled":
        return scaled(body_from_doc(doc["children"][0]), doc["factor"])
    if kind == "symmetrized":
        return symmetrize(body_from_doc(doc["children"][0]))
    raise PreconditionError(f"unknown body type {kind!r}")
