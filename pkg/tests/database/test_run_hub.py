import os                                                           as _os
import pytest

from rendezvous.coordinator.rendezvous_coordinator                  import run_scenario
from rendezvous.database.run_hub                                    import RunHub
from rendezvous.dataset.artifact_schema                             import TRAJECTORY
from rendezvous.reports.report_writer                               import RunReportWriter
from rendezvous.util.errors                                         import ArtifactError
from rendezvous.util.json_utils                                     import JSON_Utils

@pytest.fixture
def written_run(single_follower_config, tmp_path):
    result                                  = run_scenario(single_follower_config, worker_threads=1)
    hub                                     = RunHub(tmp_path / "run")
    certification                           = hub.write_run(result, plot_data=True)
    return hub, result, certification

def test_every_artifact_is_written(written_run):
    hub, _, _                               = written_run
    for filename in [RunHub.TRAJECTORY_FILE, RunHub.STEP_RECORDS_FILE, RunHub.LOSS_AUDIT_FILE, RunHub.SCENARIO_FILE,
                     RunHub.SUMMARY_FILE, RunHub.CERTIFICATION_FILE, RunHub.TOP_VIEW_FILE, RunHub.VIEW_3D_FILE]:
        assert _os.path.isfile(hub.path(filename)), filename

    with open(hub.path(RunHub.TRAJECTORY_FILE), encoding="utf-8") as file:
        header                              = file.readline().strip()
    assert header == ",".join(TRAJECTORY.columns())

def test_artifacts_read_back(written_run):
    hub, result, certification              = written_run
    hub.require()

    trajectory_df                           = hub.load_trajectory()
    assert len(trajectory_df) == len(result.trajectory_df)
    assert list(trajectory_df["agent"]) == list(result.trajectory_df["agent"])

    records                                 = hub.load_records()
    assert [rec["t"] for rec in records] == [0, 1, 2]
    assert records[1]["agents"][1]["staleness"] == {"leader": 1}

    assert hub.load_config().to_dict() == result.config.to_dict()
    assert hub.load_summary()["exit_code"] == result.exit_code
    assert hub.load_certification()["passed"] == certification.passed()
    assert len(hub.load_audit()) == len(result.audit_df)

    top_df, view_df                         = hub.load_plot_tables()
    assert len(top_df) == 4
    assert len(view_df) == 8

def test_plot_tables_are_optional(single_follower_config, tmp_path):
    hub                                     = RunHub(tmp_path / "bare")
    hub.write_run(run_scenario(single_follower_config, worker_threads=1))
    assert hub.load_plot_tables() is None

def test_certification_content(written_run):
    hub, _, _                               = written_run
    certification                           = hub.load_certification()
    for key in ["cost_convention", "rho_hat", "constants", "lyapunov", "safety_gate", "collision", "passed"]:
        assert key in certification.keys()
    assert certification["collision"]["min_pairwise"] is None
    assert certification["safety_gate"]["abort_step"] is None

def test_records_of_another_version_are_rejected(written_run):
    hub, _, _                               = written_run
    records                                 = hub.load_records()
    records[0]["version"]                   = -1
    JSON_Utils().save_lines(records, hub.path(RunHub.STEP_RECORDS_FILE))
    with pytest.raises(ArtifactError):
        hub.load_records()

def test_records_missing_keys_are_rejected(written_run):
    hub, _, _                               = written_run
    records                                 = hub.load_records()
    del records[2]["agents"][0]["mode"]
    JSON_Utils().save_lines(records, hub.path(RunHub.STEP_RECORDS_FILE))
    with pytest.raises(ArtifactError):
        hub.load_records()

def test_missing_run_folder(tmp_path):
    with pytest.raises(ArtifactError):
        RunHub(tmp_path / "absent").require()
    with pytest.raises(ArtifactError):
        RunReportWriter(RunHub(tmp_path))

def test_report_writer(written_run):
    hub, _, _                               = written_run
    writer                                  = RunReportWriter(hub)
    text                                    = writer.summary_text()
    assert text.startswith("Scenario 'single-follower': exit code 2 after 3 steps")
    assert "collision-free: yes" in text
    assert "latch steps: f1=-" in text
    assert "predictor-filled reference entries: 4" in text
    assert len(writer.gate_df()) == 3
    assert list(writer.clearance_df()["t"]) == [0, 1, 2]

    path                                    = writer.write_workbook()
    assert path == hub.path(RunReportWriter.WORKBOOK_FILE)
    assert _os.path.getsize(path) > 0
