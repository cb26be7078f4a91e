import functools

from abc import ABC, abstractmethod

from . import general as gen
from .timer import Timer


def track_exceptions(exit_codes: dict, default: int = 1):
    """Decorator for processor methods: exceptions are logged and mapped to an
    exit code by class (first match in `exit_codes` wins), otherwise to
    `default`. The wrapped method's own return value passes through."""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(self, *args, **kwargs):
            try:
                return func(self, *args, **kwargs)
            except Exception as e:
                msg = f"{func.__name__} failed: {type(e).__name__}: {e}"
                self.log.error(msg)
                self._errors.append(msg)
                for cls, code in exit_codes.items():
                    if isinstance(e, cls):
                        return code
                if not isinstance(e, (ValueError, OSError)):
                    raise
                return default

        return wrapper

    return decorator


class DataProcessor(ABC):
    def __init__(self, shortname="Processor", description=None, argv=None, log_level="INFO"):
        self._description = description
        self._argv = argv

        self.args = self.setup_command_line()
        if getattr(self.args, "debug", False):
            log_level = "DEBUG"

        self._startup_dttm = gen.get_now_local_and_utc()

        self.log = gen.get_logger(shortname, level=log_level)
        self.log.info("DataProcessor Instantiated")
        self.timer = Timer(self.log)

        self._errors = []

        return

    @property
    def errors(self):
        return list(self._errors)

    @abstractmethod
    def setup_command_line(self):
        pass

    @abstractmethod
    def run(self):
        pass

    @abstractmethod
    def shutdown(self):
        pass
