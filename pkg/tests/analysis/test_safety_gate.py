import math
import numpy                                                       as _np
import pytest

from rendezvous.analysis.safety_gate                                import GateParams, GateMonitor, evaluate_gate, \
                                                                           check_safety_gate
from rendezvous.prediction.confidence                               import ConfidenceParams

PARAMS                                                              = GateParams(ConfidenceParams(0.95), 2.5, 1.5,
                                                                                 dwell=5)

def test_threshold_of_the_shipped_geometry():
    assert PARAMS.threshold() == pytest.approx(1.0 / 5.99146, rel=1e-5)

def test_value_at_the_threshold_fails():
    threshold                               = PARAMS.threshold()
    assert not evaluate_gate(threshold, PARAMS).passed
    assert evaluate_gate(0.99 * threshold, PARAMS).passed
    assert not evaluate_gate(1.01 * threshold, PARAMS).passed

def test_margin_from_a_covariance():
    gate                                    = evaluate_gate(_np.diag([0.05, 0.02, 0.01]), PARAMS, t=4)
    assert gate.lambda_max == pytest.approx(0.05)
    assert gate.margin == pytest.approx(1.0 - math.sqrt(PARAMS.confidence.scale * 0.05))
    assert gate.margin == pytest.approx(0.4527, abs=1e-4)
    assert gate.passed
    assert gate.to_dict()["t"] == 4

def test_abort_after_the_dwell():
    trace                                   = [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]
    report                                  = check_safety_gate(trace, PARAMS)
    assert report.abort_step == 5
    assert report.abort_recommended()
    assert report.failures() == 6
    assert report.max_lambda() == 1.0
    assert not report.all_passed()

def test_interrupted_failures_reset_the_dwell():
    monitor                                 = GateMonitor(PARAMS)
    for t, value in enumerate([1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0]):
        monitor.update(value, t)
    assert monitor.report().abort_step is None
    assert monitor.consecutive_failures == 4

def test_empty_report():
    report                                  = check_safety_gate([], PARAMS)
    assert report.max_lambda() == 0.0
    assert report.all_passed()
    assert report.abort_step is None

def test_gate_params_validation():
    with pytest.raises(ValueError):
        GateParams(ConfidenceParams(0.95), 2.5, 2.5)
    with pytest.raises(ValueError):
        GateParams(ConfidenceParams(0.95), 2.5, 1.5, dwell=0)
