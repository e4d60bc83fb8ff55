import numpy as np
import pytest

from inertial_prox.errors import ConvergenceError, InvalidArgument, NotSingleValued
from inertial_prox.operators import (LeastSquaresGradient, NormalConeAffineSet,
                                     NormalConeL1Ball, ScalarAffine, ZeroOperator,
                                     project_affine, project_l1_ball,
                                     read_matrix_csv, spectral_norm_gram,
                                     write_matrix_csv)

from oracles import l1_projection_grid, l1_threshold_bisection

EX1_B = ScalarAffine(1 / 3, shift=[-1.0, 2.0, 0.0])
EX1_Z = np.array([0.3, -0.6, 0.0])


def test_scalar_affine_resolvent():
    A = ScalarAffine(3)
    np.testing.assert_array_equal(A.resolvent(1, np.zeros(3)), np.zeros(3))
    np.testing.assert_allclose(A.resolvent(1, [4, 8, 0]), [1, 2, 0])
    np.testing.assert_allclose(A.resolvent(1, EX1_Z - EX1_B.forward(EX1_Z)), EX1_Z,
                               atol=1e-15)


def test_forward_examples():
    np.testing.assert_array_equal(EX1_B.forward(np.zeros(3)), [-1, 2, 0])
    ls = LeastSquaresGradient(np.eye(2), [1, 2])
    np.testing.assert_array_equal(ls.forward([1, 2]), [0, 0])
    np.testing.assert_array_equal(ZeroOperator().forward([3.0, -1.0]), [0, 0])


def test_set_valued_forward_raises():
    for op in (NormalConeL1Ball(1.0), NormalConeAffineSet([1, 0], 1)):
        with pytest.raises(NotSingleValued):
            op.forward([0.0, 0.0])


def test_resolvent_rejects_nonpositive_r():
    for op in (ScalarAffine(1), ZeroOperator(), NormalConeL1Ball(1)):
        with pytest.raises(InvalidArgument):
            op.resolvent(0.0, [1.0, 2.0])


def test_l1_projection_examples():
    np.testing.assert_array_equal(project_l1_ball([0.5, -0.5], 2), [0.5, -0.5])
    # bisection gives lambda = 1 for (3, 1), t = 2
    assert l1_threshold_bisection([3, 1], 2) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(project_l1_ball([3, 1], 2), [2, 0], atol=1e-15)
    np.testing.assert_allclose(l1_projection_grid([1, -1], 1), [0.5, -0.5], atol=1e-3)
    np.testing.assert_allclose(project_l1_ball([1, -1], 1), [0.5, -0.5], atol=1e-15)


def test_l1_projection_errors():
    with pytest.raises(InvalidArgument):
        project_l1_ball([1.0], 0.0)


def test_l1_projection_against_bisection(rng):
    for _ in range(200):
        d = rng.integers(1, 40)
        x = rng.standard_normal(d) * rng.uniform(0.1, 5)
        t = rng.uniform(0.05, 3)
        y = project_l1_ball(x, t)
        assert np.abs(y).sum() <= t + 1e-12
        if np.abs(x).sum() <= t:
            np.testing.assert_array_equal(y, x)
        else:
            lam = l1_threshold_bisection(x, t)
            ref = np.sign(x) * np.maximum(np.abs(x) - lam, 0)
            np.testing.assert_allclose(y, ref, atol=1e-10)


def test_l1_projection_against_grid_search(rng):
    for k in range(200):
        d = 1 + k % 3
        x = rng.uniform(-2, 2, d)
        t = rng.uniform(0.3, 1.5)
        y = project_l1_ball(x, t)
        ref = l1_projection_grid(x, t, step=1e-3)
        assert np.linalg.norm(y - ref) <= 2e-3


def test_affine_projection_examples():
    np.testing.assert_array_equal(project_affine([0, 5], [1, 0], 1), [1, 5])
    x = np.array([2.0, -1.0, 4.0])
    a = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(project_affine(x, a, a @ x), x)
    np.testing.assert_allclose(project_affine([2, 0], [1, 1], 0), [1, -1])
    with pytest.raises(InvalidArgument):
        project_affine([1, 2], [0, 0], 1)


def test_affine_projection_lands_in_set(rng):
    for _ in range(100):
        a = rng.standard_normal(4)
        b = rng.standard_normal()
        y = project_affine(rng.standard_normal(4) * 10, a, b)
        assert abs(a @ y - b) <= 1e-12 * max(1, np.abs(a).max() * np.abs(y).max())


def _operators(rng, d):
    T = rng.standard_normal((d + 2, d))
    return [
        ScalarAffine(rng.uniform(0, 5), shift=rng.standard_normal(d)),
        ScalarAffine(0.0, shift=rng.standard_normal(d), gamma=1.0),
        ZeroOperator(),
        NormalConeL1Ball(rng.uniform(0.2, 3)),
        NormalConeAffineSet(rng.standard_normal(d), rng.standard_normal()),
        LeastSquaresGradient(T, rng.standard_normal(d + 2)),
    ]


def test_firm_nonexpansiveness(rng):
    for _ in range(200):
        d = 4
        for op in _operators(rng, d):
            x, y = rng.standard_normal(d) * 3, rng.standard_normal(d) * 3
            r = rng.uniform(1e-3, 10)
            jx, jy = op.resolvent(r, x), op.resolvent(r, y)
            lhs = np.sum((x - y) ** 2) - np.sum(((x - jx) - (y - jy)) ** 2)
            assert lhs - np.sum((jx - jy) ** 2) >= -1e-10
            assert np.linalg.norm(jx - jy) <= np.linalg.norm(x - y) + 1e-12


def test_resolvent_inclusion_single_valued(rng):
    for _ in range(50):
        for op in _operators(rng, 3):
            if not op.single_valued:
                continue
            x, r = rng.standard_normal(3), rng.uniform(0.01, 10)
            y = op.resolvent(r, x)
            np.testing.assert_allclose(x - y, r * op.forward(y), atol=1e-10)


def test_cocoercivity(rng):
    for _ in range(200):
        a = rng.uniform(0.01, 10)
        B = ScalarAffine(a, shift=rng.standard_normal(3))
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        dB = B.forward(x) - B.forward(y)
        assert dB @ (x - y) - B.gamma * dB @ dB >= -1e-10
    T = rng.standard_normal((8, 5))
    L = LeastSquaresGradient(T, rng.standard_normal(8))
    gamma = 1 / L.gram_norm
    for _ in range(200):
        x, y = rng.standard_normal(5), rng.standard_normal(5)
        dB = L.forward(x) - L.forward(y)
        assert dB @ (x - y) - gamma * dB @ dB >= -1e-10


def test_projection_variational_inequality(rng):
    for _ in range(200):
        d = rng.integers(2, 6)
        t = rng.uniform(0.2, 2)
        x = rng.standard_normal(d) * 3
        p = project_l1_ball(x, t)
        a, b = rng.standard_normal(d), rng.standard_normal()
        q = project_affine(x, a, b)
        for _ in range(100):
            y = rng.standard_normal(d)
            y *= t * rng.uniform() / np.abs(y).sum()
            assert (x - p) @ (y - p) <= 1e-10
            v = rng.standard_normal(d)
            yc = v - ((a @ v - b) / (a @ a)) * a
            assert (x - q) @ (yc - q) <= 1e-10


def test_spectral_norm_examples():
    assert spectral_norm_gram(np.eye(2)) == pytest.approx(1.0, rel=1e-8)
    assert spectral_norm_gram(np.diag([1.0, 2.0])) == pytest.approx(4.0, rel=1e-8)
    with pytest.raises(InvalidArgument):
        spectral_norm_gram(np.zeros((2, 3)))


def test_spectral_norm_matches_eigvalsh(rng):
    for shape in [(64, 256), (128, 512), (10, 3)]:
        T = rng.standard_normal(shape)
        ref = np.linalg.eigvalsh(T.T @ T).max()
        assert abs(spectral_norm_gram(T) - ref) / ref <= 1e-8


def test_spectral_norm_budget_exhausted():
    T = np.diag([1.0, 0.999999, 0.5])
    with pytest.raises(ConvergenceError) as exc:
        spectral_norm_gram(T, tol=1e-14, max_iter=5)
    assert exc.value.estimate > 0


def test_least_squares_gamma_has_margin(rng):
    T = rng.standard_normal((6, 9))
    op = LeastSquaresGradient(T, np.zeros(6))
    ref = np.linalg.eigvalsh(T.T @ T).max()
    assert op.gamma == pytest.approx(1 / (1.01 * ref), rel=1e-7)


def test_matrix_csv_round_trip(tmp_path, rng):
    M = rng.standard_normal((4, 3))
    write_matrix_csv(tmp_path / "M.csv", M)
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "M.csv"), M)
    v = rng.standard_normal(5)
    write_matrix_csv(tmp_path / "v.csv", v)
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "v.csv").ravel(), v)


def test_matrix_csv_rejects_ragged(tmp_path):
    (tmp_path / "bad.csv").write_text("1,2\n3\n")
    with pytest.raises(InvalidArgument):
        read_matrix_csv(tmp_path / "bad.csv")
