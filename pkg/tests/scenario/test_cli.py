import os                                                           as _os

from rendezvous.scenario.cli                                        import main, horizon_advisory
from rendezvous.scenario.scenario_config                            import ScenarioConfig

def test_validate_preset_prints_the_advisory(capsys):
    assert main(["validate", "--preset", "paper-sec6"]) == 0
    out                                     = capsys.readouterr().out
    assert "landing geometry: ok" in out
    assert "N0 = 19.9 < N = 20" in out

def test_validate_reports_a_crowded_platform(tmp_path, capsys):
    path                                    = tmp_path / "crowded.toml"
    path.write_text("[collision]\nmin_distance = 2.0\n", encoding="utf-8")
    assert main(["validate", "--config", str(path)]) == 1
    assert "separation" in capsys.readouterr().out

def test_advisory_for_a_short_horizon():
    config                                  = ScenarioConfig.loads("[scenario]\nhorizon = 10\n")
    line                                    = horizon_advisory(config)
    assert ">= N = 10" in line
    assert "needs N >= 20" in line

def test_config_and_preset_are_exclusive(single_follower_toml, capsys):
    assert main(["validate", "--config", single_follower_toml, "--preset", "paper-sec6"]) == 1
    assert capsys.readouterr().err.startswith("error: ")

def test_report_of_a_missing_run_fails(tmp_path, capsys):
    assert main(["report", str(tmp_path / "nothing")]) == 1
    assert "error: " in capsys.readouterr().err

def test_run_then_report(single_follower_toml, tmp_path, capsys):
    out                                     = str(tmp_path / "run")
    assert main(["run", "--config", single_follower_toml, "--out", out, "--steps", "2", "--workers", "1"]) == 2
    assert "Scenario 'single-follower': exit code 2 after 2 steps" in capsys.readouterr().out
    assert _os.path.isfile(_os.path.join(out, "trajectory.csv"))
    assert not _os.path.exists(_os.path.join(out, "top_view.csv"))

    assert main(["report", out, "--no-xlsx"]) == 0
    summary                                 = capsys.readouterr().out
    assert "collision-free:" in summary
    assert not _os.path.exists(_os.path.join(out, "report.xlsx"))
