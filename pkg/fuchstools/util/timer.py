import datetime
import logging
from typing import List, Optional


class Timer(object):
    """Lap timer for runs. Laps go to `log` when given, otherwise to stdout."""

    def __init__(self, log: Optional[logging.Logger] = None):
        self.log = log
        self.reset()

    def _emit(self, msg, flush=True):
        if self.log is not None:
            self.log.info(msg)
        else:
            print(msg, flush=flush)

    def lap(self, text="now", flush=True):
        now = datetime.datetime.today()

        self._emit(f"{now.strftime('%Y-%m-%d %H:%M:%S.%f')}: {text}", flush=flush)
        if self.SAVED_DTTMS:
            elapsed = (now - self.SAVED_DTTMS[-1][0]).total_seconds()
            self._emit(f"-- {elapsed} elapsed since last lap", flush=flush)
        else:
            self._emit("-- Starting first lap --", flush=flush)

        self.SAVED_DTTMS.append((now, text))

        return

    def reset(self):
        self.SAVED_DTTMS = []

    def elapsed(self) -> float:
        """Seconds from the first lap until now (0 before the first lap)."""
        if not self.SAVED_DTTMS:
            return 0.0
        return (datetime.datetime.today() - self.SAVED_DTTMS[0][0]).total_seconds()

    def summary(self, filename=None) -> List[str]:
        msgs = []
        if self.SAVED_DTTMS == []:
            msgs.append("Nothing to show!")
        else:
            msgs.append(f"{self.SAVED_DTTMS[0][0]} : {self.SAVED_DTTMS[0][1]}")
            for (d0, t0), (d1, t1) in zip(self.SAVED_DTTMS, self.SAVED_DTTMS[1:]):
                diff = (d1 - d0).total_seconds()
                msgs.append(f"{d1} : {t1} : {diff} sec diff")

            tot_diff = (self.SAVED_DTTMS[-1][0] - self.SAVED_DTTMS[0][0]).total_seconds()
            msgs.append(f"Total elapsed: {tot_diff}")

        for msg in msgs:
            self._emit(msg)

        if filename is not None:
            with open(filename, "w") as fh:
                for msg in msgs:
                    fh.write(f"{msg}\n")

        return msgs
