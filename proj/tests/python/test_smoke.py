import math

import pytest

import ipevo

BESQ = {"model": "besq", "alpha": 0.5, "seed": 1}


def test_scale_and_speed():
    assert ipevo.scale(BESQ, 1.0) == pytest.approx(1 / 1.5)
    assert ipevo.speed_mass(BESQ, 1.0, math.inf) == pytest.approx(1.0, rel=1e-6)
    assert ipevo.amplitude_tail(BESQ, 0.25, 1.0) == pytest.approx(0.125)


def test_check_report():
    r = ipevo.check({"model": "wright_fisher", "gamma1": 1.0, "gamma2": 0.25, "seed": 1})
    assert isinstance(r, dict)
    assert r


def test_usage_errors():
    with pytest.raises(ValueError):
        ipevo.check({"model": "besq"})
    with pytest.raises(ValueError):
        ipevo.check({"model": "nope", "seed": 1})


def test_dprime():
    v, exact = ipevo.dprime([2.0, 1.0], [1.0, 2.0])
    assert exact and v == pytest.approx(1.0)
    assert ipevo.dprime_bruteforce([1.0], [2.0]) == pytest.approx(1.0)


def test_spindle_is_an_excursion():
    t, v, amp, zeta = ipevo.spindle({**BESQ, "cutoff": 0.1, "dt": 1e-3})
    assert v[0] == 0.0 and v[-1] == 0.0
    assert amp > 0.1
    assert t[-1] == pytest.approx(zeta)


def test_simulate_levels_start():
    cfg = {**BESQ, "cutoff": 0.05, "dt": 1e-3, "dt_rel": 0.01, "start": [0.6, 0.3], "levels": [0.0, 0.5]}
    out = ipevo.simulate_levels(cfg)
    assert out[0.0] == pytest.approx([0.6, 0.3])


def test_experiment_names_and_run(tmp_path):
    assert "metric-oracle" in ipevo.experiment_names()
    s = ipevo.experiment("metric-oracle", {"pairs": 30, "max_blocks": 4, "seed": 2}, str(tmp_path))
    assert s["pass"]
    assert (tmp_path / "summary.json").exists()
