import math

import pytest

import logcap


def test_lebesgue_energy():
    e = logcap.energy(logcap.StepMeasure.lebesgue(), "exact")
    assert abs(e["total"] - 1.5) < 1e-12


def test_self_energy_scaling():
    assert logcap.self_energy(-1000.0) == 1001.5
    assert logcap.self_energy(math.log(1e-3)) == pytest.approx(-math.log(1e-3) + 1.5)


def test_exact_endpoints_from_strings():
    mu = logcap.StepMeasure([("0", "1/4"), ("1/2", "3/4")], [1.0, 1.0])
    assert len(mu) == 2
    assert mu.piece_mass(0) == pytest.approx(0.5)
    value, err = logcap.mutual_energy(mu, mu, "exact")
    assert value == pytest.approx(logcap.energy(mu, "exact")["total"], rel=1e-12)
    assert err == 0.0


def test_errors_map_to_python():
    with pytest.raises(logcap.DisjointnessViolation):
        logcap.StepMeasure([("0", "1/2"), ("1/4", "3/4")], [1.0, 1.0])
    with pytest.raises(logcap.PreconditionError):
        logcap.ursell_schedule("h0", 5)
    assert issubclass(logcap.PolicyError, logcap.Error)


def test_bounds():
    assert logcap.cs_lower_energy_bound([-2.0, -2.0]) == pytest.approx(1.0)
    b = logcap.tail_capacity_bound(3.0, 1, 10000)
    assert abs(b["capacity_upper_bound"] - math.exp(-6 / math.pi**2)) <= 1e-4
    assert logcap.tail_series(2.0, 1, 100)["converged"] is False
    assert logcap.phase_classify(2.0) != logcap.phase_classify(3.0)
    rows = logcap.ursell_schedule("loglog", 5)
    assert len(rows) == 5 and all(r["accepted"] for r in rows)


def test_experiment_tables():
    t = logcap.run_counterexample()
    assert logcap.column(t, "nu_circ_B")[-1] == "31/32"
    c = logcap.run_convergence(n_grid=(100, 1000))
    ratios = logcap.column(c, "normalized_self_ratio")
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)
    p = logcap.run_phase_scan()
    assert logcap.column(p, "capacity_upper_bound")[2] <= 1e-40
