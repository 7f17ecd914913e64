import os                                                   as _os

class ApplicationConfig():

    '''
    Class encapsulating the process-level configuration of the rendezvous engine, i.e., the settings that are
    not part of a scenario (those live in :class:`ScenarioConfig <rendezvous.scenario.scenario_config.ScenarioConfig>`).

    :param dict config_dict: contains the names and values of properties, as a hierarchical dictionary
    '''
    def __init__(self, config_dict):
        self.config_dict                                    = config_dict

    LOG_LEVEL_ENV_VAR                                       = "RENDEZVOUS_LOG_LEVEL"

    def log_activation_level(self):
        '''
        Provides the bit mask of active log levels. The environment variable ``RENDEZVOUS_LOG_LEVEL``, if set,
        takes precedence over the configured value.

        :return: bit mask of log levels to activate
        :rtype: int
        '''
        from_env                                            = _os.environ.get(ApplicationConfig.LOG_LEVEL_ENV_VAR)
        if not from_env is None and len(from_env.strip()) > 0:
            try:
                return int(from_env)
            except ValueError:
                raise ValueError("Environment variable " + ApplicationConfig.LOG_LEVEL_ENV_VAR + " should be an "
                                 + "integer bit mask, but got '" + str(from_env) + "'")

        return int(self._get(['logging', 'activation_level'], default=1))

    def log_file(self):
        '''
        :return: path of a file to which logs are tee-ed, or None if logs only go to standard output
        :rtype: str
        '''
        result                                              = self._get(['logging', 'log_file'], default=None)
        if result is None or len(str(result).strip()) == 0:
            return None

        # Evaluate any environment variables in the path
        #
        return _os.path.expandvars(result)

    def worker_threads(self):
        '''
        :return: maximal number of per-agent solves that may run concurrently between two barriers
        :rtype: int
        '''
        result                                              = int(self._get(['runtime', 'worker_threads'], default=4))
        if result < 1:
            raise ValueError("runtime.worker_threads should be at least 1, but got " + str(result))
        return result

    def output_root(self):
        '''
        :return: folder under which run folders are created when the command line is not given an explicit one
        :rtype: str
        '''
        result                                              = self._get(['runtime', 'output_root'], default="runs")
        return _os.path.expandvars(result)

    def _get(self, path, default):
        node                                                = self.config_dict
        for key in path:
            if not isinstance(node, dict) or not key in node.keys():
                return default
            node                                            = node[key]
        return node
