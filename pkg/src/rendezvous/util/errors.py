'''
Exception hierarchy. Following the convention used throughout the package, problems whose root cause lies with
the user (a bad scenario document, a geometry that violates the landing assumption, a missing run folder) derive
from ValueError, while malfunctions of the engine itself derive from RuntimeError.
'''

class ConfigurationError(ValueError):
    '''
    Raised when a scenario or application configuration cannot be parsed or violates an invariant.

    :param str message: description of the problem
    :param str field_path: dotted path of the offending field, e.g. "followers.weights". Optional.
    '''
    def __init__(self, message, field_path=None):
        self.field_path                             = field_path
        if field_path is None:
            super().__init__(message)
        else:
            super().__init__(field_path + ": " + message)

class ArtifactError(ValueError):
    '''
    Raised when run artifacts needed by a report or an analysis are missing or malformed.
    '''

class IntegrationError(RuntimeError):
    '''
    Raised when a vehicle model produces non-finite state components while integrating.
    '''

class SolverError(RuntimeError):
    '''
    Raised when the optimal control solver fails in a way that leaves no usable iterate.
    '''
