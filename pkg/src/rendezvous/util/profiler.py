import time

from rendezvous.observability.logger                   import Logger
from rendezvous.application.application                import Application

class Profiler():
    '''
    Context manager that provides the functionality of measuring and logging the time it takes for a block of code
    to execute. Used around scenario runs and around each step barrier.

    :param str behavior_being_profiled: describes the functionality that is being profiled. Used in the
            message displayed at the end.
    :param int log_level: level at which the elapsed time is logged. Per-step barriers use
            ``Logger.LEVEL_DETAILED`` so that long runs stay readable at the default level.

    '''
    def __init__(self, behavior_being_profiled, log_level=Logger.LEVEL_INFO):

        self.behavior_being_profiled                            = behavior_being_profiled
        self.log_level                                          = log_level
        self.elapsed                                            = None

    def __enter__(self):
        '''
        Returns self after initializing internal state
        '''
        self.T_start                                            = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_value, exc_tb):
        '''
        Logs the amount of time spent in this Profiler context manager, unless the block raised
        '''
        T1                                                      = time.perf_counter()
        self.elapsed                                            = T1 - self.T_start
        if not exc_value is None:
            return False

        latency                                                 = "{0:.2f} sec".format(self.elapsed)

        if Application.is_initialized():
            # Increase stack level by 1 in the logger since this Profiler introduced an extra layer of indirection
            # between the stack frame with the business logic and the stack frame in which the logger will run.
            Application.app().log(str(self.behavior_being_profiled) + " completed in " + latency,
                                  log_level                 = self.log_level,
                                  stack_level_increase      = 1)
        return False
