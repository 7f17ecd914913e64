import os                                                           as _os
import pytest

from rendezvous.application.application                             import Application
from rendezvous.application.application_config                      import ApplicationConfig
from rendezvous.observability.logger                                import RendezvousLogger
from rendezvous.scenario.scenario_config                            import ScenarioConfig
from rendezvous.util.toml_utils                                     import TOML_Utils

TESTS_FOLDER                                                        = _os.path.dirname(_os.path.abspath(__file__))

class RendezvousTestApplication(Application):

    '''
    Application used by the test suite, configured from ``tests/config/rendezvous_config.toml``.
    '''
    def __init__(self):
        APP_NAME                                = "rendezvous"
        config_path                             = TESTS_FOLDER + "/config"
        peek                                    = ApplicationConfig(TOML_Utils().load(config_path + "/" + APP_NAME
                                                                                       + "_config.toml"))
        logger                                  = RendezvousLogger(activation_level = peek.log_activation_level(),
                                                                   log_file         = peek.log_file())
        super().__init__(app_name = APP_NAME, config_path = config_path, logger = logger)

@pytest.fixture(scope="session", autouse=True)
def test_application():
    if not Application.is_initialized():
        RendezvousTestApplication()
    return Application.app()

# Single follower landing on a platform moving at 0.3 m/s, short enough for fast tests
SINGLE_FOLLOWER_TOML                                                = '''
[scenario]
name                = "single-follower"
seed                = 3
max_steps           = 3
horizon             = 5

[followers]
count               = 1
ring_radius         = 2.0
ring_altitude       = 4.0
'''

@pytest.fixture
def single_follower_config():
    return ScenarioConfig.loads(SINGLE_FOLLOWER_TOML, source="single_follower")

@pytest.fixture
def single_follower_toml(tmp_path):
    path                                        = tmp_path / "single_follower.toml"
    path.write_text(SINGLE_FOLLOWER_TOML, encoding="utf-8")
    return str(path)

@pytest.fixture(scope="session")
def preset_config():
    return ScenarioConfig.load_preset("paper-sec6")
