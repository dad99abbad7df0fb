"""Error types and small argument checks shared across the package."""

import math


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericError(ArithmeticError):
    """A computation produced a non-finite intermediate."""


def check_positive(value, name):
    value = float(value)
    if not (value > 0) or math.isnan(value):
        raise DomainError(f"{name} must be positive, got {value!r}")
    return value


def check_finite_positive(value, name):
    value = check_positive(value, name)
    if math.isinf(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_level_count(n_levels, minimum=2):
    if isinstance(n_levels, bool) or int(n_levels) != n_levels:
        raise DomainError(f"n_levels must be an integer, got {n_levels!r}")
    n_levels = int(n_levels)
    if n_levels < minimum:
        raise DomainError(f"n_levels must be >= {minimum}, got {n_levels}")
    return n_levels
