"""Smoke test for the confstress Python extension."""

import json
import math

import confstress


def test_scenarios():
    names = [row[0] for row in confstress.list_scenarios()]
    assert "example1-gct" in names and "void-linear" in names
    report = json.loads(confstress.run_scenario("example1-gct", {"n": 3, "a": 1.0}, deterministic=True))
    assert report["pass"] is True
    assert report["runtime_ms"] == 0
    assert abs(report["identities"][0]["lhs"] - 4 * math.pi / 27) < 1e-8
    try:
        confstress.run_scenario("no-such-scenario")
    except ValueError as e:
        assert "example1-gct" in str(e)
    else:
        raise AssertionError("unknown scenario accepted")


def test_models():
    m = confstress.Model.power(2.0, 2, 2)
    eye = [[1.0, 0.0], [0.0, 1.0]]
    assert abs(m.w(eye) - 1.0) < 1e-14
    assert m.piola(eye) == eye
    assert abs(m.excess([[0.0, 0.0], [0.0, 0.0]], eye) - 1.0) < 1e-12
    lin = confstress.Model.linear_isotropic(0.0, 0.5, 2)
    p = lin.piola([[0.0, 1.0], [-1.0, 0.0]])
    assert max(abs(v) for row in p for v in row) < 1e-14
    closed, quad = confstress.example1_energy(2, 1.0)
    assert abs(closed - math.pi / 8) < 1e-14 and abs(quad - closed) < 1e-8


def test_void_and_shock():
    v = confstress.Void(3, 1.0, 1.0, 1.0)
    lin, _ = v.delta_e_linear()
    gct, _ = v.delta_e_gct()
    assert abs(lin + 0.9 * math.pi) < 1e-8 and abs(gct - lin) < 1e-8
    g, truncated, _ = v.griffith()
    assert abs(g - 4 * math.pi / (3 * v.kappa)) < 1e-12 and len(truncated) == 3
    s = confstress.Shock(1.0, 0.0)
    assert abs(s.speed - math.sqrt(2)) < 1e-15
    assert abs(s.pstar() - 0.25) < 1e-15
    assert s.energy_balance(-2.0, 2.0, 0.5)[2]


def test_radial_profile():
    prof = confstress.RadialProfile(1.0, 2.0, n=3)
    eta, deta = prof.eval(1.0)
    assert abs(eta - 1.0) < 1e-10 and abs(deta - 2.0) < 1e-10
    f_inf, _, alpha = prof.far_field
    assert abs(f_inf - 1.84347) < 1e-4 and abs(alpha - 2.0) < 0.05
    assert len(prof.table()[0]) == 6


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name} ok")
