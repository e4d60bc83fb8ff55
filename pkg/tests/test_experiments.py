import numpy as np
import pytest

from inertial_prox.errors import DimensionError, InvalidArgument
from inertial_prox.experiments import (CSInstance, build_cs_instance,
                                       build_example1, build_example2,
                                       default_settings, recovery_metrics,
                                       table1, table2)
from inertial_prox.operators import project_l1_ball
from inertial_prox.schedules import Schedule as S
from inertial_prox.solvers import StopRule, run_alg31, run_alg32


def test_example1_builder():
    p = build_example1()
    assert p.gamma == pytest.approx(3.0)
    assert p.fixed_point_residual(p.reference_solution) <= 1e-8
    np.testing.assert_array_equal(p.B.forward(np.zeros(3)), [-1, 2, 0])
    np.testing.assert_allclose(p.A.resolvent(1.0, [4, 8, 0]), [1, 2, 0])
    assert build_example1(gamma=1 / 3).gamma == pytest.approx(1 / 3)


def test_example2_builder():
    p, x0, x1 = build_example2(64, 1)
    assert p.gamma == pytest.approx(2.0)
    assert p.fixed_point_residual(p.reference_solution) == 0.0
    assert x1[0] == 0.0
    assert build_example2(64, 2)[2][0] == -1.0
    assert x0.shape == (65,)
    with pytest.raises(InvalidArgument):
        build_example2(64, 4)
    with pytest.raises(InvalidArgument):
        build_example2(1, 1)


def _scalar_orbit(c, theta, alpha, beta, a0, a1, iters, alg):
    """Every node follows the same scalar recursion when A, B are multiples
    of the identity."""
    out = [a0, a1]
    for n in range(1, iters + 1):
        w = out[-2] + theta(n) * (out[-1] - out[-2])
        fb = c * w
        out.append(fb if alg == "alg31" else (1 - alpha(n) - beta(n)) * w + alpha(n) * fb)
    return np.array(out)


@pytest.mark.parametrize("alg", ["alg31", "alg32"])
def test_example2_scalar_consistency(alg):
    tau = 0.5
    p, x0, x1 = build_example2(128, 3, gamma=0.5)
    s = default_settings("example2", p.gamma)
    stop = StopRule("residual_step", 1e-300, 40)
    if alg == "alg31":
        rec = run_alg31(p, s["theta"], S.constant(tau), x0, x1, stop, keep_iterates=True)
    else:
        rec = run_alg32(p, s["theta"], s["alpha"], s["beta"], S.constant(tau),
                        x0, x1, stop, keep_iterates=True)
    c = (1 - tau * 0.5) / (1 + tau * 0.75)
    traj = np.array(rec.iterates)
    for j in (0, 17, 64, 128):
        ref = _scalar_orbit(c, s["theta"], s["alpha"], s["beta"], x0[j], x1[j],
                            rec.iterations, alg)
        np.testing.assert_allclose(traj[:, j], ref, rtol=1e-12, atol=1e-12)


def test_cs_instance_basics():
    inst, p = build_cs_instance(64, 256, 40, 0.0, seed=11)
    assert np.count_nonzero(inst.x_true) == 40
    assert set(np.unique(inst.x_true[inst.x_true != 0])) <= {-1.0, 1.0}
    assert np.abs(inst.x_true).sum() == 40
    assert inst.t == pytest.approx(39.999)
    np.testing.assert_array_equal(inst.b, inst.T @ inst.x_true)
    ref = np.linalg.eigvalsh(inst.T.T @ inst.T).max()
    assert p.gamma == pytest.approx(1 / (1.01 * ref), rel=1e-7)


def test_cs_instance_deterministic():
    a, _ = build_cs_instance(32, 64, 5, 0.1, seed=3)
    b, _ = build_cs_instance(32, 64, 5, 0.1, seed=3)
    c, _ = build_cs_instance(32, 64, 5, 0.1, seed=4)
    for f in ("T", "b", "x_true"):
        np.testing.assert_array_equal(getattr(a, f), getattr(b, f))
    assert not np.array_equal(a.T, c.T)


def test_cs_noise():
    inst, _ = build_cs_instance(32, 64, 5, 0.5, seed=3)
    r = inst.b - inst.T @ inst.x_true
    assert 0 < np.std(r) < 1.5


@pytest.mark.parametrize("m, n, K", [(64, 64, 3), (10, 20, 20), (10, 20, 0)])
def test_cs_instance_preconditions(m, n, K):
    with pytest.raises(InvalidArgument):
        build_cs_instance(m, n, K)


def test_gaussian_sanity():
    draws = np.random.default_rng(12345).standard_normal(10**5)
    assert abs(draws.mean()) <= 0.05
    assert abs(draws.var() - 1) <= 0.05


def test_cs_instance_round_trip(tmp_path):
    inst, _ = build_cs_instance(16, 40, 4, 0.0, seed=9)
    inst.save(tmp_path / "inst")
    assert sorted(p.name for p in (tmp_path / "inst").iterdir()) == [
        "T.csv", "b.csv", "meta.json", "x_true.csv"]
    back = CSInstance.load(tmp_path / "inst")
    np.testing.assert_array_equal(back.T, inst.T)
    np.testing.assert_array_equal(back.b, inst.b)
    assert back.meta() == inst.meta()


def test_recovery_metrics_examples():
    inst, _ = build_cs_instance(64, 256, 40, 0.0, seed=1)
    m = recovery_metrics(inst.x_true, inst)
    assert (m.rel_error, m.support_precision, m.support_recall) == (0.0, 1.0, 1.0)
    m = recovery_metrics(np.zeros(256), inst)
    assert m.rel_error == 1.0 and m.support_recall == 0.0
    x = inst.x_true.copy()
    x[np.flatnonzero(x)[0]] = 0
    assert recovery_metrics(x, inst).support_recall == 39 / 40
    with pytest.raises(DimensionError):
        recovery_metrics(np.zeros(10), inst)


@pytest.mark.parametrize("alg", ["alg31", "alg32"])
def test_cs_iterates_stay_feasible(alg):
    inst, p = build_cs_instance(32, 96, 8, 0.0, seed=5)
    s = default_settings("cs", p.gamma)
    x0 = np.zeros(96)
    stop = StopRule("residual_step", 1e-6, 300)
    if alg == "alg31":
        rec = run_alg31(p, s["theta"], s["tau"], x0, x0, stop, keep_iterates=True)
    else:
        rec = run_alg32(p, s["theta"], s["alpha"], s["beta"], s["tau"], x0, x0,
                        stop, keep_iterates=True)
    for x in rec.iterates[2:]:
        assert np.abs(x).sum() <= inst.t + 1e-9


def test_cs_small_instance_recovers():
    # K well inside the l1 recovery regime
    inst, p = build_cs_instance(64, 128, 5, 0.0, seed=2)
    s = default_settings("cs", p.gamma)
    x0 = np.zeros(128)
    rec = run_alg31(p, s["theta"], s["tau"], x0, x0, StopRule("residual_step", 1e-7, 20_000))
    assert rec.converged
    assert recovery_metrics(rec.final_iterate, inst).rel_error <= 1e-2


def test_tables_have_expected_shape():
    header, rows, _ = table1(N=64, case=2, gamma=0.5)
    assert len(rows) == 3 and all(len(r) == len(header) for r in rows)
    assert all(isinstance(v, int) for r in rows for v in r[1:4])
    header, rows, metrics = table2(seed=0, sizes=((5, 32, 64),))
    assert len(rows) == 3 and all(len(r) == len(header) for r in rows)


@pytest.mark.parametrize("m, n, K", [(64, 256, 40), (128, 512, 60)])
def test_basis_pursuit_lies_inside_the_ball(m, n, K):
    # when the smallest-l1 interpolant has norm below t, the feasible set
    # holds many zero-residual points and the true signal is not singled out
    linprog = pytest.importorskip("scipy.optimize").linprog
    inst, _ = build_cs_instance(m, n, K, seed=0)
    T = inst.T
    res = linprog(np.ones(2 * n), A_eq=np.hstack([T, -T]), b_eq=inst.b,
                  bounds=(0, None), method="highs")
    assert res.status == 0
    assert res.fun < inst.t - 1
    assert np.abs(inst.x_true).sum() == K
