import numpy as np
import pytest

from vecbal import (
    ContractViolation,
    DegenerateFaceError,
    FaceState,
    FractionalColoring,
    PreconditionError,
    SingularSystemError,
    VectorSystem,
    descend_face,
    dual_basis,
    lift,
    load_instance,
    min_norm_boundary_point,
    ray_exit,
    reduce_to_independent,
    save_instance,
)
from vecbal.zonotope import _reduce_steps


def system(cols, lam):
    return VectorSystem(np.asarray(cols, dtype=float).T, np.asarray(lam, dtype=float))


# ---------------------------------------------------------------------------
# lifting


def test_lift_single_fractional_index():
    col = FractionalColoring(np.array([1.0, 0.5, -1.0]))
    out = lift(col, {1: 0.25})
    assert np.allclose(out, [1.0, 0.25, -1.0])


def test_lift_empty_fractional_set_is_identity():
    col = FractionalColoring(np.array([1.0, -1.0]))
    out = lift(col, np.zeros(0))
    assert np.array_equal(out, [1.0, -1.0])


def test_lift_all_fractional():
    col = FractionalColoring(np.array([0.0, 0.0]))
    out = lift(col, np.array([1.0, -1.0]))
    assert np.array_equal(out, [1.0, -1.0])


def test_lift_index_mismatch_raises():
    col = FractionalColoring(np.array([0.0, 1.0]))
    with pytest.raises(ContractViolation):
        lift(col, {1: 0.5})


def test_lifting_identity_exact():
    # V lift(x, z) - t == sum_A z_i v_i - sum_A x_i v_i + (V x - t) as vectors
    rng = np.random.default_rng(5)
    for _ in range(20):
        m, n = 4, 6
        V = rng.standard_normal((m, n))
        lam = rng.uniform(-1, 1, n)
        sysm = VectorSystem(V, lam)
        x = rng.uniform(-1, 1, n)
        x[rng.choice(n, 2, replace=False)] = np.array([1.0, -1.0])
        col = FractionalColoring(x)
        act = col.active
        z = rng.uniform(-1, 1, act.size)
        lhs = V @ lift(col, z) - sysm.t
        rhs = V[:, act] @ z - V[:, act] @ x[act] + (V @ x - sysm.t)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


# ---------------------------------------------------------------------------
# reduction to independence


def test_reduce_duplicate_columns():
    sysm = system([[1, 0], [1, 0]], [0.5, 0.5])
    col = reduce_to_independent(sysm)
    assert np.allclose(sysm.V @ col.x, sysm.t, atol=1e-12)
    assert col.active.size <= 1
    assert sorted(np.abs(col.x).tolist())[-1] == 1.0
    # kernel walk from (.5, .5) along (1,-1)/sqrt(2) exits at (1, 0)
    assert np.allclose(col.x, [1.0, 0.0])


def test_reduce_already_independent_unchanged():
    sysm = system([[1, 0], [0, 1]], [0.3, -0.7])
    col = reduce_to_independent(sysm)
    assert np.allclose(col.x, [0.3, -0.7])


def test_reduce_collinear_pair():
    sysm = system([[1, 0], [2, 0]], [0.0, 0.0])
    col = reduce_to_independent(sysm)
    assert np.allclose(sysm.V @ col.x, 0.0, atol=1e-12)
    sub = sysm.V[:, col.active]
    if col.active.size:
        assert np.linalg.svd(sub, compute_uv=False)[-1] > 1e-10
    # the two kernel-walk exit points
    assert np.allclose(col.x, [1.0, -0.5]) or np.allclose(col.x, [-1.0, 0.5])


def test_reduce_zero_columns_fix_everything():
    sysm = system([[0, 0], [0, 0], [0, 0]], [0.0, 0.5, -0.25])
    col = reduce_to_independent(sysm)
    assert col.active.size == 0
    assert np.all(np.abs(col.x) == 1.0)


def test_reduce_never_grows_active_and_keeps_shift():
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = rng.integers(2, 5)
        n = rng.integers(m + 1, 9)
        V = rng.standard_normal((m, n))
        lam = rng.uniform(-1, 1, n)
        sysm = VectorSystem(V, lam)
        prev = None
        for col in _reduce_steps(sysm):
            assert np.allclose(V @ col.x, sysm.t, atol=1e-9)
            if prev is not None:
                assert col.active.size <= prev
            prev = col.active.size
        sub = V[:, col.active]
        if col.active.size:
            assert np.linalg.svd(sub, compute_uv=False)[-1] > 1e-10


# ---------------------------------------------------------------------------
# dual bases


def test_dual_basis_identity():
    duals = dual_basis(np.eye(2))
    assert np.allclose(duals, np.eye(2))


def test_dual_basis_axis_scaled():
    V = np.array([[2.0, 0.0], [0.0, 1.0]])
    duals = dual_basis(V)
    assert np.allclose(duals, [[0.5, 0.0], [0.0, 1.0]])


def test_dual_basis_shear():
    V = np.array([[1.0, 1.0], [0.0, 1.0]])
    duals = dual_basis(V)
    assert np.allclose(duals[:, 0], [1.0, -1.0])
    assert np.allclose(duals[:, 1], [0.0, 1.0])
    assert np.allclose(duals.T @ V, np.eye(2), atol=1e-8)


def test_dual_basis_rank_deficient_raises():
    with pytest.raises(SingularSystemError):
        dual_basis(np.array([[1.0, 2.0], [0.0, 0.0]]))


def test_dual_of_dual_returns_original():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = int(rng.integers(2, 6))
        k = int(rng.integers(1, m + 1))
        V = rng.standard_normal((m, k))
        if np.linalg.svd(V, compute_uv=False)[-1] < 0.1:
            continue
        again = dual_basis(dual_basis(V))
        assert np.max(np.abs(again - V)) <= 1e-7


def test_dual_basis_biorthogonal_random():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = int(rng.integers(2, 7))
        k = int(rng.integers(1, m + 1))
        V = rng.standard_normal((m, k))
        if np.linalg.svd(V, compute_uv=False)[-1] < 0.05:
            continue
        D = dual_basis(V)
        assert np.max(np.abs(D.T @ V - np.eye(k))) <= 1e-8


# ---------------------------------------------------------------------------
# face geometry


def face_of(sysm, x):
    return FaceState.from_coloring(sysm, FractionalColoring(np.asarray(x, dtype=float)))


def test_min_norm_symmetric_square():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    s, idx, sign = min_norm_boundary_point(face, sysm)
    assert np.isclose(np.linalg.norm(s), 1.0)
    assert idx in (0, 1) and sign in (-1.0, 1.0)


def test_min_norm_shifted_square():
    sysm = system([[1, 0], [0, 1]], [0.5, 0.0])
    face = face_of(sysm, [0.5, 0.0])
    s, idx, sign = min_norm_boundary_point(face, sysm)
    assert np.allclose(s, [0.5, 0.0], atol=1e-12)
    assert np.isclose(np.linalg.norm(s), 0.5)
    assert idx == 0 and sign == 1.0


def test_min_norm_sheared():
    sysm = system([[1, 0], [1, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    s, idx, sign = min_norm_boundary_point(face, sysm)
    assert np.isclose(np.linalg.norm(s), 1.0 / np.sqrt(2.0))
    assert np.allclose(np.abs(s), [0.5, 0.5])
    assert idx == 0


def brute_force_min_norm(sysm, face):
    """Project the origin onto each facet hyperplane and clamp in dual coords."""
    from vecbal.zonotope import dual_basis as db

    act = face.active
    D = db(sysm.V[:, act])
    c = face.fractional_coords(sysm)
    best = np.inf
    for i in range(act.size):
        for r in (-1.0, 1.0):
            proj = ((r - c[i]) / np.linalg.norm(D[:, i]) ** 2) * D[:, i]
            z = D.T @ (proj + face.t_bar(sysm))
            z = np.clip(z, -1.0, 1.0)
            z[i] = r
            point = sysm.V[:, act] @ (z - c)
            best = min(best, np.linalg.norm(point))
    return best


def test_min_norm_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        V = rng.standard_normal((n, n)) + np.eye(n) * 0.5
        if np.linalg.svd(V, compute_uv=False)[-1] < 0.05:
            continue
        lam = rng.uniform(-0.9, 0.9, n)
        sysm = VectorSystem(V, lam)
        face = face_of(sysm, lam)
        s, _, _ = min_norm_boundary_point(face, sysm)
        assert abs(np.linalg.norm(s) - brute_force_min_norm(sysm, face)) <= 1e-7
        assert np.linalg.norm(s) <= np.max(np.linalg.norm(V, axis=0)) + 1e-9


def test_ray_exit_axis():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    lam, hit = ray_exit(face, sysm, np.array([2.0, 0.0]))
    assert hit and np.isclose(lam, 0.5)


def test_ray_exit_interior():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    lam, hit = ray_exit(face, sysm, np.array([0.2, 0.2]))
    assert not hit and lam == 1.0


def test_ray_exit_shifted():
    sysm = system([[1, 0], [0, 1]], [0.5, 0.0])
    face = face_of(sysm, [0.5, 0.0])
    lam, hit = ray_exit(face, sysm, np.array([1.0, 0.0]))
    assert hit and np.isclose(lam, 0.5)


def test_ray_exit_zero_direction():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    lam, hit = ray_exit(face, sysm, np.zeros(2))
    assert not hit and lam == 1.0


def test_descend_face_cube_facet():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    out = descend_face(face, sysm, np.array([1.0, 0.0]))
    assert out.fixed_signs == {0: 1.0}
    assert list(out.active) == [1]
    assert np.allclose(np.abs(out.basis[:, 0]), [0.0, 1.0])


def test_descend_face_interior_noop():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    out = descend_face(face, sysm, np.zeros(2))
    assert out.active.size == 2 and out.fixed_signs == {}


def test_descend_face_sheared():
    sysm = system([[1, 0], [1, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    out = descend_face(face, sysm, np.array([0.5, -0.5]))
    assert len(out.fixed_signs) == 1
    assert out.dim == 1


def test_descend_outside_raises():
    sysm = system([[1, 0], [0, 1]], [0.0, 0.0])
    face = face_of(sysm, [0.0, 0.0])
    with pytest.raises(ContractViolation):
        descend_face(face, sysm, np.array([1.5, 0.0]))


def test_descend_strictly_decreases_dim_until_vertex():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        V = rng.standard_normal((n, n)) + 0.5 * np.eye(n)
        if np.linalg.svd(V, compute_uv=False)[-1] < 0.05:
            continue
        sysm = VectorSystem(V, rng.uniform(-0.8, 0.8, n))
        face = face_of(sysm, sysm.lam)
        steps = 0
        while face.dim > 0:
            s, _, _ = min_norm_boundary_point(face, sysm)
            nxt = descend_face(face, sysm, s)
            assert nxt.dim < face.dim
            face = nxt
            steps += 1
        assert steps <= n


def test_min_norm_empty_face_raises():
    sysm = system([[1, 0], [0, 1]], [1.0, 1.0])
    face = face_of(sysm, [1.0, 1.0])
    with pytest.raises(DegenerateFaceError):
        min_norm_boundary_point(face, sysm)


# ---------------------------------------------------------------------------
# instance files


def test_instance_roundtrip(tmp_path):
    sysm = system([[1, 0, 0.25], [0.5, -0.5, 0]], [0.25, -1.0])
    path = tmp_path / "inst.json"
    save_instance(sysm, path)
    back = load_instance(path)
    assert np.array_equal(back.V, sysm.V)
    assert np.array_equal(back.lam, sysm.lam)
    save_instance(back, tmp_path / "inst2.json")
    assert (tmp_path / "inst.json").read_bytes() == (tmp_path / "inst2.json").read_bytes()


def test_instance_rejects_bad_lambda(tmp_path):
    import json

    doc = {"m": 1, "n": 1, "vectors": [[1.0]], "lambda": [1.1]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(PreconditionError):
        load_instance(path)
