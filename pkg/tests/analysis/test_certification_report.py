import pytest

from rendezvous.analysis.certification_report                       import certify_run
from rendezvous.coordinator.rendezvous_coordinator                  import run_scenario
from rendezvous.scenario.scenario_config                            import ScenarioConfig

# One follower 5 m straight above its landing point on a platform that holds still. The region of attraction
# level V_N_max = 2400 against the initial error 10 * 5^2 = 250 gives gamma_bar = 9.6 and, with Q ratio 2.5,
# N0 = 24 below the horizon of 40. Noiseless measurements keep the predicted tail of the leader plan exact.
HOLD_DESCENT_TOML                                                   = '''
[scenario]
name                = "hold-descent"
seed                = 5
max_steps           = 30
horizon             = 40

[leader.reference]
kind                = "hold"

[followers]
count               = 1
initial_positions   = [[0.0, 0.0, 5.5]]
Q                   = [10.0, 10.0, 10.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0]

[landing]
offsets             = [[0.0, 0.0, 0.5]]

[prediction]
measurement_sigma   = 0.0

[certification]
V_N_max             = 2400.0
'''

@pytest.fixture(scope="module")
def hold_descent():
    config                                  = ScenarioConfig.loads(HOLD_DESCENT_TOML, source="hold_descent")
    result                                  = run_scenario(config, worker_threads=1)
    records                                 = [rec.to_dict() for rec in result.records]
    return config, result, certify_run(records, config, result.trajectory_df)

def test_hold_descent_lands_inside_the_region_of_attraction(hold_descent):
    config, result, report                  = hold_descent
    assert result.all_latched()
    first                                   = result.records[0].agent("f1")
    assert first.stage_cost == pytest.approx(250.0)
    assert first.cost <= config.V_N_max

def test_hold_descent_is_certified(hold_descent):
    config, result, report                  = hold_descent
    assert report.constants.gamma_bar == pytest.approx(9.6)
    assert report.constants.N0 == pytest.approx(24.0)
    assert report.constants.horizon_exceeds_N0()
    assert report.contracting()
    assert report.lyapunov_passed()
    assert report.sandwich_violations() == 0
    assert report.max_ratio() <= report.constants.gamma

    d                                       = report.to_dict()
    assert d["lyapunov"]["f1"]["passed"]
    assert d["sandwich"]["note"] is None

def test_failed_sandwich_is_explained(preset_config):
    d                                       = preset_config.to_dict()
    d["scenario"]["max_steps"]              = 6
    d["followers"]["count"]                 = 1
    d["followers"]["initial_positions"]     = [[0.0, 0.0, 2.5]]
    d["landing"]["offsets"]                 = [[0.0, 0.0, 0.5]]
    d["comm"]["loss"]                       = []
    d["certification"]["V_N_max"]           = 40.0
    config                                  = ScenarioConfig.from_dict(d)
    result                                  = run_scenario(config, worker_threads=1)
    report                                  = certify_run([rec.to_dict() for rec in result.records], config,
                                                          result.trajectory_df)
    assert report.constants.gamma_bar == pytest.approx(2.0)
    assert report.sandwich_violations() > 0
    assert report.max_ratio() > 2.0
    assert not report.lyapunov_passed()
    assert "zero velocity" in report.to_dict()["sandwich"]["note"]
