"""
Progress lines for the slow steps of a command (runs, sweeps, fixed
points)
"""

# License: BSD3

from __future__ import print_function
import logging
import sys
import time

_LOG = logging.getLogger(__name__)


# pylint: disable=too-few-public-methods, redefined-builtin
class Torpor(object):
    """
    Context manager printing ``what... done [N ms]`` around a block, or
    ``what... ERROR!`` when the block raises ::

        with Torpor("run epsilon = 0.01"):
            run_trajectory(params, outdir)

    The exception is logged at debug level and re-raised; exit codes
    and per-member failure records belong to the caller.

    :param quiet: True to time the block without printing
    """
    def __init__(self, msg, quiet=False, file=sys.stderr):
        self._msg = msg
        self._quiet = quiet
        self._file = file
        self._span = [0.0, 0.0]

    @property
    def elapsed_ms(self):
        "wall time spent inside the block"
        return 1000 * (self._span[1] - self._span[0])

    def _say(self, text, end="\n"):
        "write unless quiet"
        if not self._quiet:
            print(text, end=end, file=self._file)
            self._file.flush()

    def __enter__(self):
        self._span[0] = time.time()
        self._say(self._msg, end="... ")
        return self

    def __exit__(self, type, value, tb):
        self._span[1] = time.time()
        if tb is None:
            self._say(u"done [{:.0f} ms]".format(self.elapsed_ms))
        else:
            self._say("ERROR!")
            _LOG.debug("%s failed after %.0f ms", self._msg,
                       self.elapsed_ms, exc_info=(type, value, tb))
        return False
# pylint: enable=too-few-public-methods, redefined-builtin
