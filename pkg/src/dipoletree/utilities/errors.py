"""
Filename: errors.py

Description:
    Defines the error classes and notifications raised across
    dipoletree so descriptive messages are returned to the user.

    DataError and NumericalError are the two families the command
    line maps onto exit codes (3 and 4 respectively).
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)


# Generic families
class DataError(ValueError):
    """ Exception for invalid input data or model files """
    def __init__(self, caller: str, error: str):
        """ Returns a custom error message """
        msg = f"'{caller}' raised error: {error}."
        super().__init__(msg)


class NumericalError(ArithmeticError):
    """ Exception for numerical failures during fitting """
    def __init__(self, caller: str, error: str):
        """ Returns a custom error message """
        msg = f"'{caller}' raised error: {error}."
        super().__init__(msg)


class UsageError(ValueError):
    """ Exception for invalid command or option values """
    def __init__(self, caller: str, error: str):
        """ Returns a custom error message """
        msg = f"'{caller}' raised error: {error}."
        super().__init__(msg)


# Data errors
class SchemaError(DataError):
    """ Exception for a column mapping that does not resolve """
    def __init__(self, path: str | Path, column: str):
        """ Returns a missing column error """
        name = Path(path).name
        super().__init__("load_csv", f"column {column!r} is missing from {name!r}")


class DimensionError(DataError):
    """ Exception for covariate vectors of mismatching length """
    def __init__(self, caller: str, expected: int, received: int):
        """ Returns a dimension mismatch error """
        error = f"expected dimension {expected}, received {received}"
        super().__init__(caller, error)


class ModelFormatError(DataError):
    """ Exception for model documents that cannot be read back """
    def __init__(self, source: Any, error: str):
        """ Returns an unreadable model error """
        super().__init__("read_model", f"{source!s}: {error}")


class EmptyLabelsError(DataError):
    """ Exception signalling a node without right-comparable pairs """
    def __init__(self, n_samples: int):
        """ Returns an empty labels error """
        error = f"no right-comparable pairs among {n_samples} observations"
        super().__init__("label_dipoles", error)


class ConfigError(ValueError):
    """ Exception for invalid entries within .dipoletree """
    def __init__(self, section: str, key: str, error: str):
        """ Returns a configuration error """
        msg = f"[{section}] {key!r} is invalid: {error}."
        super().__init__(msg)


class UnknownKernel(UsageError):
    """ Exception for unknown kernel notation """
    def __init__(self, text: str, supported: list[str]):
        """ Returns an unknown kernel error """
        error = f"{text!r} is an unknown kernel. Supported kernels are {supported!r}"
        super().__init__("KernelSpec.parse", error)


class UnknownPreset(UsageError):
    """ Exception for unknown simulation presets """
    def __init__(self, name: str, supported: list[str]):
        """ Returns an unknown preset error """
        error = f"{name!r} is an unknown preset. Supported presets are {supported!r}"
        super().__init__("preset", error)


# Numerical errors
class QpInputError(NumericalError):
    """ Exception for malformed quadratic programs """
    def __init__(self, error: str):
        """ Returns a QP input error """
        super().__init__("qp.solve", error)


class QpFailureError(NumericalError):
    """ Exception for a QP the solver could not bring to a usable answer """
    def __init__(self, status: Any, error: str):
        """ Returns a QP failure error """
        super().__init__("qp.solve", f"status {status!s}, {error}")


class DegenerateSplitError(NumericalError):
    """ Exception for a node whose dipoles give the QP nothing to fit """
    def __init__(self, caller: str, error: str):
        """ Returns a degenerate split error """
        super().__init__(caller, error)


class SimulationError(NumericalError):
    """ Exception for simulation configurations that cannot be sampled """
    def __init__(self, error: str):
        """ Returns a simulation error """
        super().__init__("simulate", error)


# Notifications / warning classes
class Notification(ABC):
    """ Abstract base class for non-fatal notifications """
    @abstractmethod
    def __init__(self):
        """ Initializes the class and sets the message variable """
        self.message: str = ""

    def display(self) -> None:
        """ Routes the message through the package logger """
        logger.warning(self.message)

    def to_dict(self) -> dict[str, str]:
        """ Returns a report entry for the notification """
        return {"kind": type(self).__name__, "message": self.message}

    def __str__(self) -> str:
        """ returns the str(message) """
        return str(self.message)


class MedianFallbackWarning(Notification):
    """ Warning for leaves whose survival never reaches one half """
    def __init__(self, node_id: int, fallback: float):
        self.message = (
            f"Note: node {node_id} never drops to S(t) <= 0.5. "
            f"Median reported as the largest observed time {fallback:g}."
        )


class AlphaRangeWarning(Notification):
    """ Warning for a complexity threshold outside the usual chi-square range """
    def __init__(self, alpha_c: float, p_value: float):
        self.message = (
            f"Tip: alpha_c={alpha_c:g} lies outside [2, 4] "
            f"(chi-square(1) upper tail {p_value:.3f}). Selection continues."
        )


class SolverLimitWarning(Notification):
    """ Warning for a QP that ran out of iterations """
    def __init__(self, iterations: int, residual: float):
        self.message = (
            f"Note: QP stopped at max_iter={iterations} with residual {residual:.2e}. "
            "The best iterate is used."
        )


class DroppedWeightsWarning(Notification):
    """ Warning for observations removed from the Brier score """
    def __init__(self, count: int):
        self.message = (
            f"Note: {count} observation(s) had zero censoring survival "
            "and were dropped from the Brier score."
        )


class ValidationFallbackWarning(Notification):
    """ Warning for datasets that cannot spare a usable validation part """
    def __init__(self, n_samples: int, reason: str = "are too few for a validation split"):
        self.message = (
            f"Note: {n_samples} observations {reason}. "
            "Subtree selection reuses the training data."
        )
