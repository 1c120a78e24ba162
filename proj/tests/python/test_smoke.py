import math
import os

import pytest

if os.environ.get("SECUAV_REQUIRE_MODULE"):
    import secuav
else:
    secuav = pytest.importorskip("secuav")


def test_default_scenario_round_trip(scenario_dir):
    s = secuav.load_scenario(scenario_dir / "default.scn")
    assert s == secuav.default_scenario()
    assert secuav.parse_scenario(s.serialize()) == s
    assert len(s.gr_positions) == 3 and len(s.eav_positions) == 2


def test_rate_and_altitude():
    s = secuav.default_scenario()
    z = secuav.altitude_opt(s, (0.0, 240.0), "noncolluding")
    assert abs(z - 250.0) <= 0.05
    r = secuav.secrecy_rate(s, (0.0, 240.0), z, s.p_static, "noncolluding")
    assert r == pytest.approx(1.4520895266644, rel=1e-8)
    assert secuav.secrecy_rate(s, (0.0, 240.0), z, s.p_static, "colluding") <= r


def test_kkt_power_budget():
    p = secuav.kkt_power([5e-3, 1e-3, 2e-4], [1e-3, 2e-3, 1e-4], 1000.0, 4000.0)
    assert p[1] == 0.0
    assert sum(p) <= 3000.0 * (1 + 1e-9)
    assert all(0.0 <= x <= 4000.0 for x in p)


def test_static_placement():
    s = secuav.default_scenario()
    nc = secuav.solve_static(s, "noncolluding", coarse_step=20.0)
    c = secuav.solve_static(s, "colluding", coarse_step=20.0)
    assert nc["rate"] >= c["rate"] > 0.0
    assert s.z_min <= nc["z"] <= s.z_max


def test_short_mission_plan(scenario_dir):
    s = secuav.load_scenario(scenario_dir / "short_mission.scn")
    r = secuav.plan(s, "noncolluding", "full3d")
    assert len(r["x"]) == s.n_slots + 2
    assert (r["x"][0], r["y"][0]) == s.q_start
    assert math.isclose(r["avg_rate"], sum(r["rate"]) / s.n_slots, rel_tol=1e-12)
    hist = r["outer_history"]
    assert all(b >= a - 1e-6 for a, b in zip(hist, hist[1:]))
    fhf = secuav.plan(s, "noncolluding", "fhf-constant")
    assert r["avg_rate"] >= fhf["avg_rate"]


def test_errors():
    s = secuav.default_scenario()
    with pytest.raises(secuav.InfeasibleError):
        s.with_slots(80)
    with pytest.raises(secuav.ParseError):
        secuav.parse_scenario("alpha = two\n")
    with pytest.raises(secuav.IoError):
        secuav.load_scenario("/nonexistent/x.scn")
    with pytest.raises(secuav.ParseError):
        secuav.plan(s, "noncolluding", "warp")
