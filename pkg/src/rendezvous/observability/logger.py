import abc
import time
import inspect
import threading
import os                                                       as _os


class Logger(abc.ABC):

    '''
    Base of the engine's loggers. A message is emitted when its level bit is set in ``activation_level``, on
    standard output and, when ``log_file`` is given, appended to that file.

    :param int activation_level: bit mask of the active levels: :attr:`LEVEL_INFO` for run milestones,
        :attr:`LEVEL_DETAILED` for per-step messages such as dropped links or degraded solves, :attr:`LEVEL_DEBUG`
        for solver internals. 0 silences the logger.
    :param str log_file: optional path of a file that receives a copy of every emitted message
    '''
    def __init__(self, activation_level, log_file=None):

        self.activation_level                               = activation_level
        self.log_file                                       = log_file
        self.T0                                             = time.perf_counter()

        # Agent solves log from worker threads
        self._file_lock                                     = threading.Lock()

    LEVEL_DEBUG                                 = int('100', 2)
    LEVEL_DETAILED                              = int('010', 2)
    LEVEL_INFO                                  = int('001', 2)

    # Frames between the caller of Application.log and Logger.log
    CALLER_DEPTH                                = 3

    def log(self, message, log_level, stack_level_increase, show_caller=True, flush=True):
        '''
        :param int stack_level_increase: extra frames to skip when locating the caller, for helpers that log on
            behalf of their own callers
        :param bool show_caller: prefix the message with the module and line it was logged from
        :param bool flush: flush standard output after printing
        '''
        if self.activation_level & log_level == 0:
            return

        elapsed                                             = "{0:.2f} sec".format(time.perf_counter() - self.T0)
        source                                              = self._caller(Logger.CALLER_DEPTH + stack_level_increase) \
                                                                if show_caller else ""
        line                                                = "[ " + elapsed + " - " + threading.current_thread().name \
                                                                + " ]\t" + source + "\t" + self.unclutter(message)
        print(line, flush=flush)
        if not self.log_file is None:
            self._append(line)

    def _caller(self, depth):
        stack                                               = inspect.stack()
        if depth >= len(stack):
            return "<unknown>"
        frame                                               = stack[depth]
        module                                              = inspect.getmodule(frame[0])
        if module is None:
            return "<unknown>"
        return module.__name__.split(".")[-1] + ":" + str(frame.lineno)

    def _append(self, line):
        folder                                              = _os.path.dirname(self.log_file)
        with self._file_lock:
            if len(folder) > 0:
                _os.makedirs(folder, exist_ok=True)
            with open(self.log_file, 'a', encoding="utf-8") as file:
                file.write(line + '\n')

    @abc.abstractmethod
    def unclutter(self, message):
        '''
        :return: ``message`` shortened for display
        :rtype: str
        '''

class RendezvousLogger(Logger):

    '''
    Logger of the rendezvous command line and of library users. Absolute paths under the working directory print
    relative to it, so run folders stay short.
    '''
    def __init__(self, activation_level, log_file=None):
        super().__init__(activation_level, log_file)

    def unclutter(self, message):
        cwd                                     = _os.getcwd()
        if len(cwd) > 1:
            return str(message).replace(cwd, ".")
        return str(message)
