import math

import numpy as np
import pytest

from gaussent.covariance import symplectic_eigenvalues
from gaussent.entanglement import ModeSplit, is_ppt, partial_transpose_cm
from gaussent.exceptions import DegenerateInputError, DimensionError, InvalidPlanError
from gaussent.generators import random_cm, random_entangled_two_mode
from gaussent.measure_sim import (
    CSV_HEADER,
    MeasurementPlan,
    compare_strategies,
    comparison_csv,
    deviation_statistic,
    nine_step_estimate,
    nine_step_from_quantities,
    simulate_strategy,
    write_csv,
)
from gaussent.symplectic import direct_sum


def test_exact_path_reference(ref):
    r = nine_step_estimate(ref)
    assert r.a == pytest.approx(math.sqrt(10.5)) and r.b == pytest.approx(math.sqrt(10.5))
    assert r.abs_det_c == pytest.approx(6.25)
    assert r.det_gamma == pytest.approx(16.5)
    spec, pt = r.branch(-1)
    np.testing.assert_allclose(spec, [2.345, 1.732], atol=1e-3)
    np.testing.assert_allclose(pt, [5.745, 0.707], atol=1e-3)
    np.testing.assert_allclose(spec, symplectic_eigenvalues(ref), atol=1e-10)
    assert r.entangled and r.sign_ambiguity_resolved
    assert r.log_negativity == pytest.approx(0.5 * math.log(2))


def test_exact_path_product(rng):
    g = direct_sum(random_cm(1, rng), random_cm(1, rng))
    r = nine_step_estimate(g)
    assert r.abs_det_c == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(r.branch(1)[0], r.branch(-1)[0], atol=1e-6)
    assert not r.entangled and r.sign_ambiguity_resolved


def test_exact_path_symmetric_family(sym_family):
    a, b = 2.0, 1.5
    r = nine_step_estimate(sym_family(a, b))
    assert r.pt_min == pytest.approx(a - b)
    # the true coupling has det C < 0
    np.testing.assert_allclose(r.branch(-1)[1], [a + b, a - b], atol=1e-10)


def test_exact_path_errors():
    with pytest.raises(DimensionError):
        nine_step_estimate(np.eye(6))
    with pytest.raises(DimensionError):
        nine_step_estimate(np.eye(4), ModeSplit(2, 1))
    with pytest.raises(DegenerateInputError) as err:
        nine_step_from_quantities(1.0, 1.0, 5.0, 0.0, -5.0)
    assert err.value.step == 5


def test_exact_path_oracle(rng):
    for _ in range(200):
        g = random_cm(2, rng, max_r=1.2)
        r = nine_step_estimate(g)
        exact = symplectic_eigenvalues(partial_transpose_cm(g))
        assert r.pt_min <= exact[-1] + 1e-8
        true_branch = -1 if np.linalg.det(g[:2, 2:]) < 0 else 1
        spec, pt = r.branch(true_branch)
        np.testing.assert_allclose(spec, symplectic_eigenvalues(g), atol=1e-8)
        np.testing.assert_allclose(pt, exact, atol=1e-8)


def test_sign_verdict_matches_ppt(rng):
    for _ in range(300):
        g = random_entangled_two_mode(rng)
        assert nine_step_estimate(g).entangled == (not is_ppt(g))
    for _ in range(100):
        g = random_cm(2, rng, max_r=0.8)
        r = nine_step_estimate(g)
        if r.sign_ambiguity_resolved:
            assert r.entangled == (not is_ppt(g))


def test_plan_validation():
    with pytest.raises(InvalidPlanError):
        MeasurementPlan("eleven", 100, 10, 1)
    with pytest.raises(InvalidPlanError):
        MeasurementPlan("ten_entries", 100, 0, 1)
    with pytest.raises(InvalidPlanError):
        MeasurementPlan("ten_entries", 19, 5, 1)
    with pytest.raises(InvalidPlanError):
        MeasurementPlan("nine_kinds", 100, 5, -1)
    with pytest.raises(InvalidPlanError):
        MeasurementPlan("nine_kinds", 100, 5, 1, sampler="poisson")
    assert MeasurementPlan("ten_entries", 1000, 1, 0).samples_per_kind == 100
    assert MeasurementPlan("nine_kinds", 1000, 1, 0).samples_per_kind == 111


def test_exact_sampler_recovers_truth(ref):
    for strat in ("ten_entries", "nine_kinds"):
        rep = simulate_strategy(ref, MeasurementPlan(strat, 100, 5, 7, sampler="exact"))
        assert rep.deviation <= 1e-12
        assert rep.n_nan == 0
    diag = np.diag([2.0, 0.5, 1.5, 1.0])
    rep = simulate_strategy(diag, MeasurementPlan("ten_entries", 100, 3, 7, sampler="exact"))
    assert rep.deviation <= 1e-12


def test_determinism(ref):
    plan = MeasurementPlan("nine_kinds", 1000, 20, 99)
    a = simulate_strategy(ref, plan)
    b = simulate_strategy(ref, plan)
    np.testing.assert_array_equal(a.pt_min, b.pt_min)
    c1 = compare_strategies(ref, [100, 1000], 10, 5).to_csv()
    c2 = compare_strategies(ref, [100, 1000], 10, 5).to_csv()
    assert c1 == c2
    c3 = compare_strategies(ref, [100, 1000], 10, 6).to_csv()
    assert c1 != c3


def test_deviation_statistic_edge_cases():
    assert deviation_statistic([0.5], 0.7) == pytest.approx(0.2)
    assert deviation_statistic([1.0, 3.0], 2.0) == pytest.approx(math.sqrt(2.0))
    assert deviation_statistic([np.nan, 1.0, 3.0], 2.0) == pytest.approx(math.sqrt(2.0))
    assert math.isnan(deviation_statistic([np.nan], 1.0))


def test_single_repetition(ref):
    rep = simulate_strategy(ref, MeasurementPlan("nine_kinds", 10000, 1, 3))
    assert rep.deviation == pytest.approx(abs(rep.pt_min[0] - 1 / math.sqrt(2)))


def test_csv_format(ref, tmp_path):
    comp = compare_strategies(ref, [100, 1000], 5, 1)
    text = comp.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("2,") and lines[2].startswith("3,")
    for line in lines[1:]:
        for field in line.split(",")[1:]:
            assert field == f"{float(field):.6g}"
    p = tmp_path / "out.csv"
    write_csv(comp.rows, p)
    assert p.read_text() == comparison_csv(comp.rows)
    with pytest.raises(InvalidPlanError):
        compare_strategies(ref, [], 5, 1)


def test_single_strategy_column(ref):
    comp = compare_strategies(ref, [1000], 5, 1, strategies=("nine_kinds",))
    assert math.isnan(comp.rows[0].delta_ten) and math.isfinite(comp.rows[0].delta_nine)


def test_invalid_truth_rejected():
    with pytest.raises(InvalidPlanError):
        simulate_strategy(0.5 * np.eye(4), MeasurementPlan("ten_entries", 100, 2, 1))


@pytest.mark.parametrize("strategy", ["ten_entries", "nine_kinds"])
def test_consistency_large_budget(ref, strategy):
    rep = simulate_strategy(ref, MeasurementPlan(strategy, 10 ** 6, 200, 12345, sampler="chi2"))
    assert abs(rep.mean_pt_min - 1 / math.sqrt(2)) <= 0.05
    assert rep.deviation < 0.1
    assert rep.n_nan == 0


def test_monotone_trend_small_vs_large(ref):
    comp = compare_strategies(ref, [100, 10 ** 6], 100, 2024, sampler="chi2")
    for col in ("delta_ten", "delta_nine"):
        assert getattr(comp.rows[0], col) > getattr(comp.rows[1], col)
