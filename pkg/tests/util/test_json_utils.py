import numpy                                                       as _np
import pytest

from rendezvous.application.application_config                      import ApplicationConfig
from rendezvous.util.errors                                         import ArtifactError, ConfigurationError
from rendezvous.util.json_utils                                     import JSON_Utils
from rendezvous.util.toml_utils                                     import TOML_Utils

def test_numpy_values_are_saved_as_plain_json(tmp_path):
    path                                    = str(tmp_path / "data.json")
    JSON_Utils().save({"n": _np.int64(3), "x": _np.float64(0.5), "ok": _np.bool_(True), "v": _np.arange(3)}, path)
    assert JSON_Utils().load(path) == {"n": 3, "x": 0.5, "ok": True, "v": [0, 1, 2]}

def test_json_lines(tmp_path):
    path                                    = str(tmp_path / "records.jsonl")
    JSON_Utils().save_lines([{"t": 0}, {"t": 1, "v": _np.float64(2.5)}], path)
    with open(path, "a", encoding="utf-8") as file:
        file.write("\n")
    assert JSON_Utils().load_lines(path) == [{"t": 0}, {"t": 1, "v": 2.5}]

def test_invalid_json_names_the_line(tmp_path):
    path                                    = tmp_path / "records.jsonl"
    path.write_text('{"t": 0}\n{"t": \n', encoding="utf-8")
    with pytest.raises(ArtifactError) as info:
        JSON_Utils().load_lines(str(path))
    assert "line 2" in str(info.value)

def test_missing_json_files(tmp_path):
    with pytest.raises(ArtifactError):
        JSON_Utils().load(str(tmp_path / "absent.json"))
    with pytest.raises(ArtifactError):
        JSON_Utils().load_lines(str(tmp_path / "absent.jsonl"))

def test_toml_parse_errors():
    with pytest.raises(ConfigurationError) as info:
        TOML_Utils().loads("a = ", source="inline")
    assert "inline" in str(info.value)

def test_application_config_defaults_and_overrides(monkeypatch):
    monkeypatch.delenv(ApplicationConfig.LOG_LEVEL_ENV_VAR, raising=False)
    config                                  = ApplicationConfig({"logging": {"activation_level": 3, "log_file": ""},
                                                                 "runtime": {"worker_threads": 2}})
    assert config.log_activation_level() == 3
    assert config.log_file() is None
    assert config.worker_threads() == 2
    assert config.output_root() == "runs"

    monkeypatch.setenv(ApplicationConfig.LOG_LEVEL_ENV_VAR, "7")
    assert config.log_activation_level() == 7
    monkeypatch.setenv(ApplicationConfig.LOG_LEVEL_ENV_VAR, "loud")
    with pytest.raises(ValueError):
        config.log_activation_level()

def test_worker_threads_must_be_positive():
    with pytest.raises(ValueError):
        ApplicationConfig({"runtime": {"worker_threads": 0}}).worker_threads()
