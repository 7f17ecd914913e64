import numpy                                                       as _np
import pytest

from rendezvous.analysis.lyapunov_check                             import check_lyapunov_decrease, estimate_contraction

def _geometric(steps=12):
    errors                                  = 100.0 * 0.5 ** _np.arange(steps)
    return 1.5 * errors, errors

def test_geometric_decay_passes():
    values, errors                          = _geometric()
    report                                  = check_lyapunov_decrease(values, errors, alpha_n=0.5, gamma=2.0)
    assert report.passed()
    assert report.nonincreasing
    assert len(report.steps) == len(values) - 1
    assert report.to_dict()["checked_steps"] == len(values) - 1

def test_injected_increase_is_flagged_at_its_step():
    values, errors                          = _geometric()
    values                                  = values.copy()
    values[6]                               = values[5] - 0.5 * errors[5] + 11e-6 * values[5]
    report                                  = check_lyapunov_decrease(values, errors, alpha_n=0.5, gamma=3.0)
    assert report.violation_steps() == [5]
    assert report.violations()[0].excess() > 0
    assert report.sandwich_violations == []
    assert not report.passed()

def test_small_excess_stays_within_tolerance():
    values, errors                          = _geometric()
    values                                  = values.copy()
    values[6]                               = values[5] - 0.5 * errors[5] + 0.5e-6 * values[5]
    report                                  = check_lyapunov_decrease(values, errors, alpha_n=0.5, gamma=3.0)
    assert report.violation_steps() == []

def test_sandwich_violations_use_the_given_steps():
    values, errors                          = _geometric(4)
    report                                  = check_lyapunov_decrease(values, errors, alpha_n=0.5, gamma=1.2,
                                                                      steps=[10, 11, 12, 13])
    assert report.sandwich_violations == [10, 11, 12, 13]
    assert report.violation_steps() == []

def test_lengths_must_agree():
    with pytest.raises(ValueError):
        check_lyapunov_decrease([1.0, 0.5], [1.0], alpha_n=0.1, gamma=2.0)

def test_single_value_is_trivially_fine():
    report                                  = check_lyapunov_decrease([3.0], [2.0], alpha_n=0.1, gamma=2.0)
    assert report.passed()
    assert report.nonincreasing

def test_contraction_estimate():
    assert estimate_contraction([4.0, 2.0, 1.0]) == pytest.approx(0.5)
    assert estimate_contraction([4.0, 3.0, 0.3]) == pytest.approx(0.75)
    assert estimate_contraction([1.0]) == 0.0
    assert estimate_contraction([0.0, 0.0]) == 0.0

def test_value_floor_breaks_the_upper_sandwich():
    errors                                  = _np.array([8.0, 4.0, 2.0, 1.0])
    values                                  = errors + 6.0
    report                                  = check_lyapunov_decrease(values, errors, alpha_n=0.5, gamma=2.0)
    assert report.sandwich_violations == [1, 2, 3]
    assert report.max_ratio == pytest.approx(7.0)
    assert report.to_dict()["max_ratio"] == pytest.approx(7.0)
