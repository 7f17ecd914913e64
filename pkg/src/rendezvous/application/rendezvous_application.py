from rendezvous.application.application                     import Application
from rendezvous.observability.logger                        import RendezvousLogger
from rendezvous.application.application_config              import ApplicationConfig
from rendezvous.util.path_utils                             import PathUtils
from rendezvous.util.toml_utils                             import TOML_Utils

class RendezvousApplication(Application):

    '''
    Concrete application used by the ``rendezvous`` command line.

    :param str config_path: folder containing a ``rendezvous_config.toml``. If None, the configuration bundled
        inside the package is used.
    '''
    def __init__(self, config_path=None):
        APP_NAME                                = "rendezvous"
        if config_path is None:
            config_path                         = RendezvousApplication.bundled_config_folder()

        # The logger needs the activation level before the Application base class has parsed the configuration,
        # so we peek at it here.
        #
        config_dict                             = TOML_Utils().load(config_path + "/" + APP_NAME + "_config.toml")
        peek                                    = ApplicationConfig(config_dict)
        logger                                  = RendezvousLogger(activation_level = peek.log_activation_level(),
                                                                   log_file         = peek.log_file())

        super().__init__(app_name = APP_NAME, config_path = config_path, logger = logger)

    def bundled_config_folder():
        '''
        :return: folder inside the installed package that holds the default ``rendezvous_config.toml``
        :rtype: str
        '''
        return PathUtils().n_directories_up(__file__, 1) + "/config"
