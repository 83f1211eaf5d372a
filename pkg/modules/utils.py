import math

import numpy as np


def relative_norm(num: np.ndarray, den: np.ndarray) -> float:
    """Ratio of the l2 norms of two arrays.

    Args:
        num (np.ndarray): numerator array
        den (np.ndarray): denominator array

    Returns:
        float: ||num|| / ||den||, or 0.0 when both are zero and inf when only
            the denominator is zero
    """
    top = float(np.linalg.norm(num))
    bottom = float(np.linalg.norm(den))
    if bottom == 0.0:
        return 0.0 if top == 0.0 else float("inf")
    return top / bottom


def log_relative_change(previous: np.ndarray, current: np.ndarray) -> float:
    """Natural log of ||current - previous|| / ||previous||.

    Returns:
        float: the log ratio, -inf when the iterates are identical or the
            previous iterate is zero
    """
    if not np.any(previous):
        return float("-inf")
    ratio = relative_norm(current - previous, previous)
    return math.log(ratio) if ratio > 0.0 else float("-inf")


def require_positive(**values: float) -> None:
    """Check that every named value is strictly positive.

    Raises:
        SolverError: naming the first offending parameter
    """
    for name, value in values.items():
        if not value > 0:
            raise SolverError(f"Parameter {name} must be positive, got {value}")


class OperatorError(Exception):
    pass


class SolverError(Exception):
    pass


class SettingsError(Exception):
    pass


class ImageFormatError(Exception):
    pass
