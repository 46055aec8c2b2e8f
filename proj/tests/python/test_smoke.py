import math

import pytest

import covidrhythm as cr


def test_version():
    assert cr.__version__


def test_resting_heart_rate_carries_last_value():
    hr = [60.0, 61.0, 62.0, 63.0]
    steps = [0.0, 0.0, 5.0, 0.0]
    # minute 0 sees steps at minute 2 inside its 6-minute lookahead,
    # so nothing is resting until the activity leaves the horizon.
    rhr = cr.resting_heart_rate(hr, steps)
    assert len(rhr) == 4
    assert rhr[0] == 0.0


def test_interpolation_and_smoothing():
    filled = cr.interpolate_linear([1.0, None, 3.0])
    assert filled == [1.0, 2.0, 3.0]
    assert cr.smooth_sma([2.0, 4.0, 6.0], 2) == [2.0, 3.0, 5.0]


def test_window_counts():
    assert cr.window_count(1440, 60, 0.5) == 47
    assert cr.window_count(1440, 60, 0.0) == 24
    assert cr.window_count(1440, 60, 0.25) == 31


def test_sensor_features_shape_and_values():
    names = cr.sensor_feature_names()
    assert len(names) == 39
    feats = cr.sensor_features([60.0] * 60, [0.0] * 60)
    assert set(feats) == set(names)
    assert feats["rhr.mean"] == 60.0
    assert feats["steps.total_steps"] == 0.0
    assert feats["steps.sedentary_bout_count"] == 1.0


def test_cosinor_recovery():
    t = [float(h) for h in range(48)]
    y = [70.0 + 5.0 * math.cos(2 * math.pi * (h - 6.0) / 24.0) for h in t]
    fit = cr.cosinor_fit(t, y, 24.0)
    assert fit["mesor"] == pytest.approx(70.0, abs=1e-9)
    assert fit["amplitude"] == pytest.approx(5.0, abs=1e-9)
    assert fit["acrophase_hours"] == pytest.approx(6.0, abs=1e-9)


def test_rhythm_metrics():
    assert cr.intradaily_variability([1.0, 2.0, 3.0, 4.0, 5.0]) == pytest.approx(0.5)
    assert cr.sample_entropy([3.0] * 40, 2, 0.2) == 0.0
    profile = [5.0] * 10 + [0.0] * 14
    assert cr.m10_l5_ra(profile, 1.0)["ra"] == pytest.approx(1.0)
    params = cr.rhythm_parameters(
        [float(h) for h in range(48)],
        [10.0 + math.cos(2 * math.pi * h / 24.0) for h in range(48)],
    )
    assert len(params) == 9
    assert params["mesor"] == pytest.approx(10.0, abs=1e-9)


def test_mutual_information_and_ranking():
    labels = [i % 2 for i in range(100)]
    planted = [float(v) for v in labels]
    noise = [((i * 37) % 97) / 97.0 for i in range(100)]
    assert cr.mutual_information(planted, labels) == pytest.approx(math.log(2))
    ranked = cr.rank_features([noise, planted], ["noise", "planted"], labels, 1)
    assert ranked[0][0] == "planted"


def test_metrics():
    report = cr.metrics([1, 1, 0, 0], [0.9, 0.4, 0.2, 0.1])
    assert report["sensitivity"] == 0.5
    assert report["specificity"] == 1.0
    assert report["auc_roc"] == 1.0


def test_cohort_truth_deterministic():
    a = cr.generate_cohort_truth(n_healthy=3, n_infected=2, days=2, seed=9)
    b = cr.generate_cohort_truth(n_healthy=3, n_infected=2, days=2, seed=9)
    assert a == b
    assert len(a) == 5
    assert sum(1 for s in a if s["infected"]) == 2


def test_errors_surface_as_python_exceptions():
    with pytest.raises(cr.PipelineError):
        cr.cosinor_fit([0.0, 1.0], [1.0], 24.0)
