try:
    import tomllib                                     as _tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli                                       as _tomllib

from rendezvous.util.errors                            import ConfigurationError

class TOML_Utils():
    '''
    Utility class consisting of helper methods to manipulate TOML files.
    '''
    def __init__(self):
        pass

    def load(self, path):
        '''
        :param str path: The location of the TOML file to be loaded
        :return: the contents of the TOML file
        :rtype: dict
        '''
        try:
            with open(path, "rb") as file:
                loaded_dict                             = _tomllib.load(file)
                return loaded_dict
        except _tomllib.TOMLDecodeError as ex:
            # tomllib already reports "(at line L, column C)" in its message
            raise ConfigurationError("Unable to parse TOML file '" + str(path) + "'. Error is:\n\t" + str(ex))
        except Exception as ex:
            raise ConfigurationError("Unable to load TOML file '" + str(path) + "'. Error is:\n\t" + str(ex))

    def loads(self, text, source="<string>"):
        '''
        :param str text: TOML content
        :param str source: describes where ``text`` came from, used in error messages
        :return: the parsed contents
        :rtype: dict
        '''
        try:
            return _tomllib.loads(text)
        except _tomllib.TOMLDecodeError as ex:
            raise ConfigurationError("Unable to parse TOML from " + str(source) + ". Error is:\n\t" + str(ex))
