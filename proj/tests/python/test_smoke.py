import math
import os
import pathlib

import numpy as np
import pytest
from scipy.optimize import minimize, nnls

import uavsec

ROOT = pathlib.Path(os.environ.get("UAVSEC_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def small_scenario(n_slots=4, radii=(20.0, 80.0)):
    s = uavsec.Scenario()
    s.altitude = 100.0
    s.slot_len = 5.0
    s.v_max = 10.0
    s.start_xy = (-60.0, -50.0)
    s.end_xy = (60.0, -50.0)
    s.avg_power = uavsec.dbm_to_watt(-5.0)
    s.peak_power = 4.0 * s.avg_power
    s.gamma0 = uavsec.db_to_linear(80.0)
    s.eves = [uavsec.EveRegion(-200.0, 0.0, radii[0]), uavsec.EveRegion(200.0, 0.0, radii[1])]
    return uavsec.with_duration(s, n_slots * s.slot_len)


def test_scalar_examples():
    assert uavsec.worst_case_dist_sq((0.0, 0.0), uavsec.EveRegion(-200, 0, 20), 100.0) == pytest.approx(42400.0)
    assert uavsec.rate_bob((0.0, 0.0), 100.0, 1e8, 3.162e-4) == pytest.approx(2.057, rel=1e-3)
    assert uavsec.psd_check(2.0, 1.0, 1.0, 1.0)
    assert not uavsec.psd_check(1.0, 1.0, 0.0, 0.5)
    assert uavsec.slot_count(160.0, 0.5) == 320


def test_scenario_file_and_validation():
    s = uavsec.load_scenario(str(ROOT / "scenarios" / "reference.json"))
    assert s.n_slots == 320
    assert uavsec.validate(s) == []
    s.peak_power = s.avg_power
    assert any("avg_power < peak_power" in msg for _, msg in uavsec.validate(s))
    with pytest.raises(ValueError, match="eves"):
        uavsec.parse_scenario('{"altitude": 100, "flight_duration": 1, "slot_len": 1, "v_max": 1,'
                              ' "start_xy": [0, 0], "end_xy": [0, 0], "avg_power": 1, "peak_power": 2,'
                              ' "gamma0_db": 80}')


def test_power_allocation():
    d = uavsec.optimize_power([1e4, 2000.0], [1e8 / 24400, 1e4], 3.162e-4, 4 * 3.162e-4)
    assert d.schedule.p[0] == pytest.approx(2 * 3.162e-4, rel=1e-9)
    assert d.schedule.p[1] == 0.0
    assert d.lam > 0


def test_algorithms_rank_as_expected():
    s = small_scenario(n_slots=8)
    rates = {a: uavsec.run(s, a).secrecy_rate for a in ("robust", "non-robust", "best-effort")}
    assert rates["robust"] >= rates["best-effort"] - 1e-9
    r = uavsec.run(s, "robust")
    objs = [it.objective for it in r.iterations]
    assert all(b >= a - 1e-6 for a, b in zip(objs, objs[1:]))
    assert len(r.trajectory) == s.n_slots + 2


def test_sweep_and_verify():
    rows = uavsec.sweep(small_scenario(n_slots=8), "T", [40.0, 45.0], ["best-effort"], threads=2)
    assert [r["value"] for r in rows] == [40.0, 45.0]
    checks = uavsec.verify("quick")
    assert all(passed for _, passed, _ in checks), checks


def _scipy_solve(prog):
    """Same program, solved by SLSQP as an independent reference."""

    lin = np.array(prog.linear)
    logs = prog.log_terms

    def affine(a):
        idx = np.array([t[0] for t in a.terms], dtype=int)
        coef = np.array([t[1] for t in a.terms])
        return idx, coef, a.constant

    def ev(aff, z):
        idx, coef, c = aff
        return c + (coef @ z[idx] if len(idx) else 0.0)

    def neg_obj(z):
        v = lin @ z + prog.constant
        for var, kappa in logs:
            v -= math.log2(1.0 + kappa / z[var])
        return -v

    cons = []
    for e in prog.linear_cons:
        a = affine(e)
        cons.append({"type": "ineq", "fun": lambda z, a=a: ev(a, z)})
    for nb in prog.norm_cons:
        parts = [affine(p) for p in nb.parts]
        rhs = affine(nb.rhs)
        cons.append({"type": "ineq", "fun": lambda z, p=parts, r=rhs: ev(r, z) - sum(ev(q, z) ** 2 for q in p)})
    for cone in prog.cones:
        a, d = affine(cone.a), affine(cone.d)
        parts = [affine(p) for p in cone.parts]
        cons.append({"type": "ineq", "fun": lambda z, a=a, d=d, p=parts: ev(a, z) * ev(d, z) - sum(ev(q, z) ** 2 for q in p)})
        cons.append({"type": "ineq", "fun": lambda z, a=a: ev(a, z)})
        cons.append({"type": "ineq", "fun": lambda z, d=d: ev(d, z)})

    res = minimize(neg_obj, np.array(prog.initial), method="SLSQP", constraints=cons,
                   options={"ftol": 1e-14, "maxiter": 2000})
    return res


def _kkt_residual(prog, z, active_tol=1e-6):
    """Stationarity with nonnegative multipliers fitted on the active constraints."""

    z = np.asarray(z)
    n = prog.num_vars

    def grad_val(a):
        g = np.zeros(n)
        for i, c in a.terms:
            g[i] += c
        return g, a.eval(list(z))

    grad_f = np.array(prog.linear, dtype=float)
    for var, kappa in prog.log_terms:
        grad_f[var] += kappa / (math.log(2.0) * z[var] * (z[var] + kappa))

    rows = []
    for e in prog.linear_cons:
        rows.append(grad_val(e))
    for nb in prog.norm_cons:
        g, v = grad_val(nb.rhs)
        for q in nb.parts:
            gq, vq = grad_val(q)
            g, v = g - 2.0 * vq * gq, v - vq * vq
        rows.append((g, v))
    for cone in prog.cones:
        ga, a = grad_val(cone.a)
        gd, d = grad_val(cone.d)
        g, v = d * ga + a * gd, a * d
        for q in cone.parts:
            gq, vq = grad_val(q)
            g, v = g - 2.0 * vq * gq, v - vq * vq
        rows.append((g, v))

    active = [g for g, v in rows if v <= active_tol * max(1.0, np.linalg.norm(g))]
    if not active:
        return np.linalg.norm(grad_f) / max(1.0, np.linalg.norm(grad_f))
    _, res = nnls(np.array(active).T, -grad_f, maxiter=50 * n)
    return res / max(1.0, np.linalg.norm(grad_f))


@pytest.mark.parametrize("n_slots,radii", [(2, (20.0, 80.0)), (3, (0.0, 40.0)), (4, (20.0, 80.0)), (4, (35.0, 10.0))])
def test_barrier_solver_matches_slsqp(n_slots, radii):
    s = small_scenario(n_slots=n_slots, radii=radii)
    assert uavsec.validate(s) == []
    traj = uavsec.best_effort_trajectory(s)
    prog = uavsec.assemble(traj, uavsec.equal_power(s), s)
    ours = uavsec.solve_program(prog)
    assert ours.status == "optimal"
    assert ours.primal_residual <= 1e-8
    assert _kkt_residual(prog, ours.z) <= 1e-6
    ref = _scipy_solve(prog)
    assert prog.max_violation(list(ref.x)) <= 1e-7
    assert ours.objective == pytest.approx(-ref.fun, abs=1e-6)
    # Nothing SLSQP finds is better than the barrier solution.
    assert -ref.fun <= ours.objective + 1e-6
