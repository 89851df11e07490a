"""Vector systems and the geometry of the shifted parallelepiped.

A vector system is a matrix V of columns v_1..v_n together with a certificate
lambda in [-1,1]^n; the induced shift is t = V @ lambda, so t is guaranteed to
lie in the zonotope sum([-v_i, v_i]).  The central geometric object is the
parallelepiped

    P = sum_i [-v_i, v_i] - t,

whose vertices correspond to full sign vectors chi in {-1,1}^n.  This module
provides:

* fractional colorings x in [-1,1]^n and the lifting map that extends a
  coloring of the fractional coordinates to a full coloring,
* the reduction of any system to one whose fractional-support columns are
  linearly independent (kernel walking, no LP solver),
* dual bases v_i* = columns of V (V^T V)^{-1}, which give closed-form facet
  coordinates:  x in P  iff  <v_i*, x + t> in [-1, 1] for every active i,
* face states (point, fixed signs, active set, orthonormal basis of the span
  of the active columns) with boundary queries and face descent.

Tolerances: tol_frac = 1e-9 decides fractionality, singular values below
1e-10 count as rank deficiency, dual-coordinate boundary tests use 1e-8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolation,
    DegenerateFaceError,
    PreconditionError,
    SingularSystemError,
)

TOL_FRAC = 1e-9
TOL_RANK = 1e-10
TOL_FACET = 1e-8


# ---------------------------------------------------------------------------
# vector systems


@dataclass(frozen=True)
class VectorSystem:
    """Input vectors (columns of V) with the shift certificate lambda.

    The shift t = V @ lambda is always derived, never stored independently,
    so t in sum([-v_i, v_i]) holds by construction.
    """

    V: np.ndarray
    lam: np.ndarray
    norm_bound: float | None = None

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if V.ndim != 2:
            raise PreconditionError("V must be an m x n matrix")
        if lam.shape != (V.shape[1],):
            raise PreconditionError("lambda must have one entry per column of V")
        if not np.all(np.isfinite(V)):
            raise PreconditionError("vector entries must be finite")
        if np.any(np.abs(lam) > 1.0 + 1e-12):
            raise PreconditionError("lambda entries must lie in [-1, 1]")
        lam = np.clip(lam, -1.0, 1.0)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "lam", lam)
        if self.norm_bound is not None:
            norms = np.linalg.norm(V, axis=0)
            if np.any(norms > self.norm_bound + 1e-9):
                raise PreconditionError(
                    f"column norm {norms.max():.6g} exceeds declared bound {self.norm_bound}"
                )

    @property
    def m(self) -> int:
        return self.V.shape[0]

    @property
    def n(self) -> int:
        return self.V.shape[1]

    @property
    def t(self) -> np.ndarray:
        return self.V @ self.lam

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.V, axis=0)

    def scaled(self, c: float) -> "VectorSystem":
        """Jointly scale the system: vectors c*v_i, same certificate (t -> c*t)."""
        return VectorSystem(c * self.V, self.lam.copy(), None)


def save_instance(sys: VectorSystem, path) -> None:
    """Write the instance JSON: {"m", "n", "vectors", "lambda"}; t stays derived."""
    doc = {
        "m": sys.m,
        "n": sys.n,
        "vectors": [list(map(float, sys.V[:, i])) for i in range(sys.n)],
        "lambda": [float(x) for x in sys.lam],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ": "), indent=1)
        fh.write("\n")


def load_instance(path) -> VectorSystem:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("m", "n", "vectors", "lambda"):
        if key not in doc:
            raise PreconditionError(f"instance file missing field {key!r}")
    vectors = np.asarray(doc["vectors"], dtype=float)
    if vectors.shape != (doc["n"], doc["m"]):
        raise PreconditionError("vectors must be n rows of m floats")
    lam = np.asarray(doc["lambda"], dtype=float)
    if lam.shape != (doc["n"],):
        raise PreconditionError("lambda must have n entries")
    if np.any(np.abs(lam) > 1.0 + 1e-12):
        raise PreconditionError("lambda entries outside [-1, 1]")
    return VectorSystem(vectors.T.copy(), lam)


# ---------------------------------------------------------------------------
# fractional colorings and lifting


@dataclass
class FractionalColoring:
    """A point x in [-1,1]^n with its set of fractional coordinates."""

    x: np.ndarray
    tol_frac: float = TOL_FRAC

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        if np.any(np.abs(x) > 1.0 + self.tol_frac):
            raise PreconditionError("coloring entries must lie in [-1, 1]")
        # snap near-integral coordinates so dead coordinates cannot stay active
        hit = np.abs(x) >= 1.0 - self.tol_frac
        x[hit] = np.sign(x[hit])
        x[x == 0.0] = 0.0  # normalize -0.0
        self.x = x

    @property
    def active(self) -> np.ndarray:
        """Indices with x_i strictly inside (-1, 1)."""
        return np.flatnonzero(np.abs(self.x) < 1.0 - self.tol_frac)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def is_full(self) -> bool:
        return self.active.size == 0


def lift(coloring: FractionalColoring, z: dict | np.ndarray) -> np.ndarray:
    """Extend a coloring of the fractional coordinates to all n coordinates.

    ``z`` maps each active index to a value in [-1, 1] (a dict, or an array
    ordered like ``coloring.active``).  Fixed coordinates keep their sign from
    ``coloring``; if z is a full sign assignment the output is a full coloring.
    """
    act = coloring.active
    if isinstance(z, dict):
        if set(z.keys()) != set(int(i) for i in act):
            raise ContractViolation("index set of z must equal the fractional set")
        vals = np.array([z[int(i)] for i in act], dtype=float)
    else:
        vals = np.asarray(z, dtype=float)
        if vals.shape != (act.size,):
            raise ContractViolation("z must assign exactly the fractional coordinates")
    if np.any(np.abs(vals) > 1.0 + TOL_FRAC):
        raise ContractViolation("lifted values must lie in [-1, 1]")
    out = coloring.x.copy()
    out[act] = vals
    return out


# ---------------------------------------------------------------------------
# reduction to linear independence


def _min_singular(A: np.ndarray) -> float:
    if A.size == 0:
        return np.inf
    if A.shape[1] > A.shape[0]:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def _kernel_vector(A: np.ndarray) -> np.ndarray:
    """Unit vector in (or nearest to) the null space of A's columns."""
    k = A.shape[1]
    if not np.any(A):
        u = np.zeros(k)
        u[0] = 1.0
        return u
    _, _, vt = np.linalg.svd(A, full_matrices=True)
    u = vt[-1]
    j = int(np.argmax(np.abs(u)))
    if u[j] < 0:
        u = -u
    return u


def _reduce_steps(sys: VectorSystem):
    """Yield successive colorings of the kernel walk; the last one is reduced."""
    col = FractionalColoring(sys.lam)
    yield col
    while True:
        act = col.active
        sub = sys.V[:, act]
        if act.size == 0 or _min_singular(sub) > TOL_RANK:
            return
        u = _kernel_vector(sub)
        x_act = col.x[act]
        with np.errstate(divide="ignore"):
            up = np.where(u > 0, (1.0 - x_act) / u, np.where(u < 0, (-1.0 - x_act) / u, np.inf))
            dn = np.where(u < 0, (1.0 - x_act) / (-u), np.where(u > 0, (-1.0 - x_act) / (-u), np.inf))
        step_up = float(np.min(up))
        step_dn = float(np.min(dn))
        # ties break toward the kernel vector's positive orientation
        if step_up <= step_dn:
            x_new = x_act + step_up * u
        else:
            x_new = x_act - step_dn * u
        x_full = col.x.copy()
        x_full[act] = np.clip(x_new, -1.0, 1.0)
        col = FractionalColoring(x_full)
        yield col


def reduce_to_independent(sys: VectorSystem) -> FractionalColoring:
    """Find x in [-1,1]^n with V @ x = t and independent fractional columns.

    Starting from the certificate lambda, repeatedly move x along a null
    vector of the fractional-support submatrix until a coordinate hits +-1;
    V @ x is invariant along null directions, so the shift identity is
    preserved while the fractional set shrinks.
    """
    col = None
    for col in _reduce_steps(sys):
        pass
    resid = np.linalg.norm(sys.V @ col.x - sys.t)
    if resid > 1e-8 * np.linalg.norm(sys.t) + 1e-10:
        raise ContractViolation(f"kernel walk drifted off the shift: residual {resid:.3g}")
    return col


# ---------------------------------------------------------------------------
# dual bases


def dual_basis(V_sub: np.ndarray) -> np.ndarray:
    """Dual vectors v_i* = columns of V (V^T V)^{-1} for independent columns.

    They lie in span(V_sub) and satisfy <v_i*, v_j> = delta_ij.
    """
    V_sub = np.asarray(V_sub, dtype=float)
    if V_sub.ndim != 2:
        raise PreconditionError("dual_basis expects a matrix")
    if V_sub.shape[1] == 0:
        return V_sub.copy()
    if _min_singular(V_sub) <= TOL_RANK:
        raise SingularSystemError("columns are numerically dependent; no dual basis")
    gram = V_sub.T @ V_sub
    return V_sub @ np.linalg.inv(gram)


# ---------------------------------------------------------------------------
# face states


def _orthonormal_basis(cols: np.ndarray) -> np.ndarray:
    """Column-pivoted-QR orthonormal basis of the column span."""
    if cols.shape[1] == 0:
        return np.zeros((cols.shape[0], 0))
    q, r = np.linalg.qr(cols)
    keep = np.abs(np.diag(r)) > TOL_RANK
    return q[:, keep]


@dataclass
class FaceState:
    """Current point q of P together with its minimal face.

    ``active`` indexes the columns spanning W = span(v_i : i in active);
    ``fixed_signs`` records the +-1 coordinates defining the face; ``basis``
    is an orthonormal basis of W.  The face parallelepiped recentred at q is
    P_bar = {x in W : <v_i*, x + t_bar> in [-1,1]}, t_bar = q + t - sum of
    fixed signs times their vectors.
    """

    q: np.ndarray
    fixed_signs: dict[int, float]
    active: np.ndarray
    basis: np.ndarray
    _duals: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_coloring(cls, sys: VectorSystem, coloring: FractionalColoring) -> "FaceState":
        act = coloring.active
        sub = sys.V[:, act]
        if act.size > 0 and _min_singular(sub) <= TOL_RANK:
            raise SingularSystemError("active columns must be independent to form a face")
        fixed = {int(i): float(coloring.x[i]) for i in range(coloring.n) if i not in set(act.tolist())}
        q = sys.V @ coloring.x - sys.t
        fs = cls(q=q, fixed_signs=fixed, active=act.copy(), basis=_orthonormal_basis(sub))
        fs.validate(sys)
        return fs

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def duals(self, sys: VectorSystem) -> np.ndarray:
        if self._duals is None:
            self._duals = dual_basis(sys.V[:, self.active])
        return self._duals

    def t_bar(self, sys: VectorSystem) -> np.ndarray:
        """Shift of the face parallelepiped: t_bar = q + t - sum_fixed s_i v_i."""
        out = self.q + sys.t
        for i, s in self.fixed_signs.items():
            out = out - s * sys.V[:, i]
        return out

    def fractional_coords(self, sys: VectorSystem) -> np.ndarray:
        """Coordinates y with t_bar = sum_{i active} y_i v_i (in active order)."""
        if self.active.size == 0:
            return np.zeros(0)
        return self.duals(sys).T @ self.t_bar(sys)

    def coloring(self, sys: VectorSystem) -> np.ndarray:
        """Full x in [-1,1]^n implied by the face state (V @ x - t = q)."""
        x = np.zeros(sys.n)
        for i, s in self.fixed_signs.items():
            x[i] = s
        x[self.active] = self.fractional_coords(sys)
        return x

    def dual_coords(self, sys: VectorSystem, point: np.ndarray) -> np.ndarray:
        """Box coordinates of a point of W relative to the face parallelepiped."""
        return self.duals(sys).T @ (point + self.t_bar(sys))

    def validate(self, sys: VectorSystem) -> None:
        B = self.basis
        if B.shape[1] != self.active.size:
            raise ContractViolation("basis dimension does not match the active set")
        if B.size:
            gram_err = np.max(np.abs(B.T @ B - np.eye(B.shape[1])))
            if gram_err > 1e-10:
                raise ContractViolation(f"basis not orthonormal: {gram_err:.3g}")
            for i in self.active:
                v = sys.V[:, i]
                err = np.linalg.norm(B @ (B.T @ v) - v)
                if err > 1e-8 * max(1.0, np.linalg.norm(v)):
                    raise ContractViolation("basis does not span the active columns")
        y = self.fractional_coords(sys)
        if np.any(np.abs(y) > 1.0 + TOL_FACET):
            raise ContractViolation("q lies outside the parallelepiped")
        x = self.coloring(sys)
        resid = np.linalg.norm(sys.V @ x - sys.t - self.q)
        if resid > 1e-7 * (1.0 + np.linalg.norm(self.q)):
            raise ContractViolation(f"q is not consistent with the face coloring: {resid:.3g}")


def min_norm_boundary_point(face: FaceState, sys: VectorSystem):
    """Minimum l2-norm point of the face parallelepiped's relative boundary.

    The boundary minimizer is collinear with one dual vector: among the
    candidates ((r - <v_i*, t_bar>) / ||v_i*||^2) v_i*, r in {-1, +1}, the one
    of least norm.  Returns (s, active-list position i, sign r); membership of
    s on the boundary is re-verified through dual coordinates.
    """
    if face.active.size == 0:
        raise DegenerateFaceError("empty active set has no boundary")
    D = face.duals(sys)
    c = face.fractional_coords(sys)
    norms = np.linalg.norm(D, axis=0)
    # candidate (i, r) has norm |r - c_i| / ||v_i*||
    cand = np.empty((face.active.size, 2))
    cand[:, 0] = np.abs(-1.0 - c) / norms
    cand[:, 1] = np.abs(1.0 - c) / norms
    flat = int(np.argmin(cand))
    i, ri = divmod(flat, 2)
    r = -1.0 if ri == 0 else 1.0
    s = ((r - c[i]) / norms[i] ** 2) * D[:, i]
    z = face.dual_coords(sys, s)
    if abs(abs(z[i]) - 1.0) > TOL_FACET or np.any(np.abs(z) > 1.0 + TOL_FACET):
        raise ContractViolation("minimum-norm candidate failed the boundary check")
    return s, int(face.active[i]), float(r)


def ray_exit(face: FaceState, sys: VectorSystem, b: np.ndarray):
    """Largest lambda with lambda*b inside the face parallelepiped, capped at 1.

    Returns (lambda, hit): hit is False when b stays strictly interior (then
    lambda = 1), True when the segment [0, b] meets the relative boundary at
    lambda <= 1.  b must lie in W.
    """
    b = np.asarray(b, dtype=float)
    B = face.basis
    if np.linalg.norm(B @ (B.T @ b) - b) > 1e-8 * (1.0 + np.linalg.norm(b)):
        raise PreconditionError("direction must lie in the face subspace")
    if not np.any(b):
        return 1.0, False
    c = face.fractional_coords(sys)
    d = face.duals(sys).T @ b
    lam_max = np.inf
    for ci, di in zip(c, d):
        if di > 0.0:
            lam_max = min(lam_max, (1.0 - ci) / di)
        elif di < 0.0:
            lam_max = min(lam_max, (-1.0 - ci) / di)
    lam_max = max(lam_max, 0.0)
    if lam_max > 1.0:
        return 1.0, False
    return float(lam_max), True


def descend_face(face: FaceState, sys: VectorSystem, s: np.ndarray) -> FaceState:
    """Move q by s; coordinates whose dual value reaches +-1 become fixed.

    For s on the relative boundary the active set strictly shrinks and the
    basis is recomputed for the remaining columns; for interior s only q
    shifts.
    """
    s = np.asarray(s, dtype=float)
    z = face.dual_coords(sys, s)
    if np.any(np.abs(z) > 1.0 + TOL_FACET):
        raise ContractViolation("point lies outside the face parallelepiped")
    z = np.clip(z, -1.0, 1.0)
    hit = np.abs(z) >= 1.0 - TOL_FACET
    new_fixed = dict(face.fixed_signs)
    for pos in np.flatnonzero(hit):
        idx = int(face.active[pos])
        new_fixed[idx] = float(np.sign(z[pos])) if z[pos] != 0.0 else 1.0
    keep = face.active[~hit]
    new_q = face.q + s
    fs = FaceState(
        q=new_q,
        fixed_signs=new_fixed,
        active=keep.copy(),
        basis=_orthonormal_basis(sys.V[:, keep]),
    )
    fs.validate(sys)
    return fs
