# errors.py

"""
Exception hierarchy shared by every chshlab module.

Library code raises; the CLI and the harness graph nodes catch, log and fall back.
"""


class LabError(Exception):
    """Base class for all chshlab failures"""


class ValidationError(LabError):
    """Input violates a documented precondition"""


class DimensionError(ValidationError):
    """Shapes or tensor factor dimensions do not line up"""


class LabelError(ValidationError):
    """Block maps are keyed by different label sets"""


class CapacityError(LabError):
    """Exact evolution or dense simulation would exceed the configured cap"""


class StrategyError(LabError):
    """A strategy cannot be transformed as requested"""


class DeviceViolation(LabError):
    """A simulated device answered with the wrong arity or type"""


class ConfigError(LabError):
    """Configuration file missing or unparseable"""


class CircuitSyntaxError(ValidationError):
    """Circuit text could not be parsed; carries the 1-based line and column"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
