#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Exceptions and process exit codes"""

from enum import IntEnum
from typing import Any, Optional, Text


class ExitCode(IntEnum):
    """CLI exit status"""

    # all good
    OK = 0

    # unknown command, unreadable or invalid config document
    CONFIG_ERROR = 1

    # quadrature, grid or rejection sampler failed
    NUMERICAL_FAILURE = 2

    # at least one acceptance criterion failed
    ACCEPTANCE_FAILURE = 3


class JotError(Exception):
    """Base class for all SDK exceptions"""

    exit_code: ExitCode = ExitCode.NUMERICAL_FAILURE


class DomainError(JotError, ValueError):
    """
    Invalid argument: carries the offending argument name and value

    >>> raise DomainError("alpha", 1.5, "must be in (0, 1)")
    """

    exit_code = ExitCode.CONFIG_ERROR

    def __init__(self, name: Text, value: Any = None, reason: Text = "invalid value"):
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"{name}={value!r}: {reason}")


class ConfigError(JotError):
    """Config document violates the schema"""

    exit_code = ExitCode.CONFIG_ERROR

    def __init__(self, pointer: Text, message: Text):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer or '/'}: {message}")


class NumericalError(JotError):
    """Base class for numerical failures"""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within its subdivision budget"""

    def __init__(self, message: Text, residual: Optional[float] = None):
        self.residual = residual
        super().__init__(f"{message} (residual estimate: {residual!r})")


class GridError(NumericalError):
    """Grid density could not be normalized"""


class TruncationError(NumericalError):
    """Ranked-jump generation exceeded its budget"""


class InverseTailError(NumericalError):
    """Inverse tail could not be evaluated"""


class ConstructionError(NumericalError):
    """Equal adjacent jumps: indicates an RNG or inverse-tail defect"""


class RejectionExhausted(NumericalError):
    """Rejection sampler ran out of tries"""

    def __init__(self, tries: int, accepted: int):
        self.tries = tries
        self.accepted = accepted
        self.acceptance_rate = accepted / tries if tries else 0.0
        super().__init__(
            f"{accepted} accepted in {tries} tries "
            f"(acceptance rate {self.acceptance_rate:.3g})"
        )


class BridgeRefused(JotError, ValueError):
    """The partition law of this family depends on the conditioned total mass"""

    exit_code = ExitCode.CONFIG_ERROR


class AcceptanceFailure(JotError):
    """An acceptance criterion failed"""

    exit_code = ExitCode.ACCEPTANCE_FAILURE
