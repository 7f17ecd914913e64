import pandas                                                      as _pd
import pytest

from rendezvous.coordinator.agent_runtime                           import AgentRuntime
from rendezvous.coordinator.rendezvous_coordinator                  import RendezvousCoordinator, RunResult, \
                                                                           run_scenario
from rendezvous.dataset.artifact_schema                             import TRAJECTORY
from rendezvous.scenario.scenario_config                            import ScenarioConfig
from rendezvous.util.errors                                         import ConfigurationError

def _muted_leader(config):
    d                                       = config.to_dict()
    d["comm"]["loss"]                       = [{"from": "leader", "to": "*", "windows": [{"start": 0}]}]
    return ScenarioConfig.from_dict(d)

def test_short_run_hits_the_step_cap(single_follower_config):
    result                                  = run_scenario(single_follower_config, worker_threads=1)
    assert result.exit_code == RunResult.EXIT_STEP_CAP
    assert result.steps_run() == 3
    assert not result.all_latched()
    assert result.latch_steps == {"f1": None}
    assert len(result.trajectory_df) == 8
    assert list(result.trajectory_df.columns) == TRAJECTORY.columns()
    assert result.collision_report.min_pairwise is None
    assert result.worst_case is None

    summary                                 = result.summary()
    assert summary["scenario"] == "single-follower"
    assert summary["exit_code"] == RunResult.EXIT_STEP_CAP
    assert summary["steps"] == 3

def test_first_step_sees_same_step_broadcasts(single_follower_config):
    coordinator                             = RendezvousCoordinator(single_follower_config, worker_threads=1)
    first                                   = coordinator.run_step(0)
    second                                  = coordinator.run_step(1)
    assert first.agent("f1").staleness["leader"] == 0
    assert second.agent("f1").staleness["leader"] == 1
    assert first.agent("leader").staleness == {}
    assert first.broadcasts() == ["leader", "f1"]
    assert first.agent("f1").mode == AgentRuntime.TRACKING
    assert not first.gate is None

def test_runs_are_reproducible(single_follower_config):
    first                                   = run_scenario(single_follower_config, worker_threads=1)
    second                                  = run_scenario(single_follower_config, worker_threads=1)
    _pd.testing.assert_frame_equal(first.trajectory_df, second.trajectory_df)

def test_worker_count_does_not_change_the_result(single_follower_config):
    serial                                  = run_scenario(single_follower_config, worker_threads=1)
    concurrent                              = run_scenario(single_follower_config, worker_threads=2)
    _pd.testing.assert_frame_equal(serial.trajectory_df, concurrent.trajectory_df)

def test_muted_leader_is_predicted(single_follower_config):
    talking                                 = run_scenario(single_follower_config, worker_threads=1)
    muted                                   = run_scenario(_muted_leader(single_follower_config), worker_threads=1)
    assert talking.predicted_entries() == 4
    assert muted.predicted_entries() == 18
    assert muted.records[1].agent("f1").staleness["leader"] is None
    assert muted.summary()["predicted_entries"] == 18
    assert (muted.audit_df["status"] == "dropped").sum() == 3

def test_invalid_landing_geometry_is_rejected():
    config                                  = ScenarioConfig.loads("[collision]\nmin_distance = 2.0\n")
    with pytest.raises(ConfigurationError) as info:
        RendezvousCoordinator(config, worker_threads=1)
    assert info.value.field_path == "landing"

def test_plot_tables_are_relative_to_the_platform(single_follower_config):
    result                                  = run_scenario(single_follower_config, worker_threads=1)
    top_df, view_df                         = result.plot_tables()
    assert len(top_df) == 4
    assert len(view_df) == 8
    first                                   = top_df.iloc[0]
    assert first["rel_x"] == pytest.approx(2.0)
    assert view_df[view_df["agent"] == "leader"]["h_C"].isna().all()

@pytest.mark.slow
def test_six_followers_land_safely(preset_config):
    result                                  = run_scenario(preset_config)
    assert result.exit_code == RunResult.EXIT_SUCCESS
    assert result.all_latched()
    assert result.collision_report.passed()
    assert result.gate_report.all_passed()
    assert all(not step is None and step <= 40 for step in result.latch_steps.values())
    assert all(not rec.gate is None for rec in result.records)
    assert len(result.gate_report.gates) == result.steps_run()
    assert result.gate_report.max_lambda() < 0.06
    assert all(agent.leader_lambda_max < 0.06 for rec in result.records for agent in rec.agents
               if agent.role == AgentRuntime.FOLLOWER)

@pytest.mark.slow
def test_six_follower_run_is_reproducible(preset_config):
    short                                   = preset_config.with_overrides(max_steps=12)
    first                                   = run_scenario(short, worker_threads=1)
    second                                  = run_scenario(short, worker_threads=4)
    _pd.testing.assert_frame_equal(first.trajectory_df, second.trajectory_df)

# Two followers swapping sides of the platform; their direct paths cross above the center
CROSSING_TOML                                                       = '''
[scenario]
name                = "crossing"
seed                = 5
max_steps           = 40
horizon             = 5

[followers]
count               = 2
initial_positions   = [[3.0, 0.4, 2.5], [-3.0, -0.4, 2.5]]

[landing]
offsets             = [[-1.5, 0.0, 0.0], [1.5, 0.0, 0.0]]

[collision]
enabled             = {enabled}
'''

def test_collision_constraints_keep_crossing_followers_apart():
    unconstrained                           = ScenarioConfig.loads(CROSSING_TOML.format(enabled="false"))
    constrained                             = ScenarioConfig.loads(CROSSING_TOML.format(enabled="true"))
    assert not unconstrained.collision.enabled

    free                                    = run_scenario(unconstrained, worker_threads=1)
    assert free.collision_report.min_pairwise < 0.0
    assert all(len(agent.inflation) == 0 for record in free.records for agent in record.agents
               if agent.role == AgentRuntime.FOLLOWER)

    avoided                                 = run_scenario(constrained, worker_threads=1)
    assert avoided.collision_report.pairwise_passed()
    assert avoided.collision_report.min_pairwise >= -1e-6
