"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: InputError -> 2, NumericalError -> 3,
SaturationError / SamplingError -> 4.
"""


class VirobustError(Exception):
    """Base class for all toolkit errors."""


class InputError(VirobustError):
    """Bad user input: unreadable files, malformed lines, invalid parameters."""


class NumericalError(VirobustError):
    """Irrecoverable numerical failure (e.g. non-positive-definite kernel)."""


class SaturationError(VirobustError):
    """Rewiring could not reach the requested number of swaps."""

    def __init__(self, message, swaps_done=0, swaps_wanted=0):
        super().__init__(message)
        self.swaps_done = swaps_done
        self.swaps_wanted = swaps_wanted


class SamplingError(VirobustError):
    """Configuration-model sampling exhausted its retry budget."""
