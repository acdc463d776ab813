import json
import math
import os

import pytest

import _extcal as xc


def test_elliptic_values():
    k = 1.0 / math.sqrt(2.0)
    K = xc.elliptic_K(k)
    assert abs(K - 1.8540746773013719) < 1e-12
    assert abs(xc.jacobi_cn(K, k)) < 1e-12
    sn, cn, dn = xc.jacobi_elliptic(0.7, k)
    assert abs(sn * sn + cn * cn - 1.0) < 1e-12
    assert abs(dn * dn + k * k * sn * sn - 1.0) < 1e-12
    with pytest.raises(Exception):
        xc.elliptic_K(1.5)


def test_membrane_pulsation():
    run = xc.integrate_spherical(1.0, 0.0, 2.0, 1e-4)
    assert run["stopped_near_collapse"]
    assert run["max_first_integral_rel_drift"] < 1e-8
    t0 = xc.spherical_collapse_time(1.0)
    assert abs(t0 - xc.spherical_collapse_time_quadrature(1.0)) < 1e-9
    worst = max(
        abs(r - xc.spherical_closed_form(1.0, tau + t0))
        for tau, r in zip(run["tau"], run["r"])
    )
    assert worst < 1e-6


def test_string_solver_residuals():
    out = xc.solve_string("open", n_sigma=65, cfl=0.5, tau_end=2.0, amplitude=0.1, mode=1)
    h = out["dsigma"]
    assert out["wave_residual"] < 50 * h * h
    assert out["compat_residual"] < 50 * h * h
    assert out["covariant_residual"] < 100 * h * h
    assert out["has_boundary"]
    with pytest.raises(xc.PreconditionError):
        xc.solve_string("open", cfl=2.0)


def test_particle_free_momentum():
    out = xc.integrate_particle(mass=1.0, u0=[math.sqrt(2.0), 1.0, 0.0, 0.0], tau_end=1.0)
    p0 = out["p"][0]
    drift = max(abs(p[i] - p0[i]) for p in out["p"] for i in range(4))
    assert drift < 1e-10
    assert out["max_shell_residual"] < 1e-10


def test_scenario_roundtrip(tmp_path):
    doc = {
        "kind": "membrane",
        "name": "smoke",
        "payload": {"r0": 1.0, "rdot0": 0.0, "tau_end": 1.0, "step": 1e-4},
    }
    summary = json.loads(xc.run_scenarios(json.dumps(doc), str(tmp_path)))
    assert summary["overall_pass"]
    assert (tmp_path / "smoke_radius.csv").exists()
    assert (tmp_path / "smoke_report.json").exists()


def test_pullback_and_stokes():
    form = {
        "dim": 2,
        "grade": 1,
        "terms": [
            {"indices": [1], "coeff": {"nvars": 2, "terms": [{"exps": [1, 0], "num": 1}]}}
        ],
    }
    assert xc.stokes_residual(json.dumps(form), "unit-square", 8) < 1e-10
    map_json = {
        "domain_dim": 2,
        "components": [
            {"nvars": 2, "terms": [{"exps": [2, 0], "num": 1}, {"exps": [0, 1], "num": 1}]},
            {"nvars": 2, "terms": [{"exps": [0, 2], "num": 1}]},
        ],
    }
    assert xc.pullback_commutes_d(json.dumps(form), json.dumps(map_json))


def test_suite_seeded_determinism():
    a = xc.run_suite(99)
    b = xc.run_suite(99)
    assert a == b
    rep = json.loads(a)
    assert rep["overall_pass"]
