"""
Things that go wrong in the lab, and how the command line reports them
"""

# license: Public domain

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class CpeError(Exception):
    """
    Root of everything we raise on purpose
    """
    exit_code = EXIT_NUMERICAL


class ConfigError(CpeError):
    """
    Bad configuration or command line usage
    """
    exit_code = EXIT_USAGE


class GridError(ConfigError, ValueError):
    """
    Grid dimensions we cannot work with
    """


class NumericalError(CpeError):
    """
    The computation itself broke down
    """


class DegenerateDensityError(NumericalError):
    """
    Density got too close to vacuum for the ε-system to make sense
    """


class InadmissibleDataError(NumericalError):
    """
    Initial data violating the admissibility bounds
    """


class NoContractionError(NumericalError):
    """
    Fixed point iteration failed to contract even after shrinking
    the time window
    """


class NotSPDError(NumericalError):
    """
    Mass matrix failed its Cholesky factorisation
    """


class QuadratureError(NumericalError):
    """
    Quadrature grid too coarse for the modes it has to integrate
    """


class HypothesisError(NumericalError, ValueError):
    """
    Level-set data that cannot even be fed to the decay check
    (unsorted thresholds, negative or increasing measures)
    """


class GridMismatchError(NumericalError, ValueError):
    """
    Two series that were supposed to be comparable are not
    """


class SnapshotError(CpeError):
    """
    Malformed snapshot file

    :param offset: byte offset where things went wrong (or None)
    """
    exit_code = EXIT_IO

    def __init__(self, msg, offset=None):
        if offset is not None:
            msg = "{} (at byte {})".format(msg, offset)
        super(SnapshotError, self).__init__(msg)
        self.offset = offset
