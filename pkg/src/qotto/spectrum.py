"""Particle-in-a-box spectrum with tunable effective mass and well width.

Reduced units throughout: hbar**2 * pi**2 / 2 == 1, masses and lengths are
measured against reference values, so ``E_n = n**2 / (mass * length**2)``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import DomainError, check_finite_positive, check_level_count

__all__ = ["BoxSpectrum", "energy_level", "level_gap"]


@dataclass(frozen=True)
class BoxSpectrum:
    """Lowest ``n_levels`` eigenvalues of a 1D infinite well.

    Parameters
    ----------
    mass : float
        Effective mass in units of the reference mass.
    length : float
        Well width in units of the reference length.
    n_levels : int
        Number of retained levels, at least 2.
    """

    mass: float
    length: float
    n_levels: int

    def __post_init__(self):
        object.__setattr__(self, "mass", check_finite_positive(self.mass, "mass"))
        object.__setattr__(self, "length", check_finite_positive(self.length, "length"))
        object.__setattr__(self, "n_levels", check_level_count(self.n_levels))

    @property
    def scale(self):
        """``mass * length**2``, the common denominator of every level."""
        return self.mass * self.length * self.length

    @cached_property
    def quantum_numbers(self):
        n = np.arange(1, self.n_levels + 1, dtype=float)
        n.setflags(write=False)
        return n

    @cached_property
    def energies(self):
        """Read-only array ``[E_1, ..., E_N]``; may hold ``inf`` on overflow."""
        n = self.quantum_numbers
        with np.errstate(over="ignore"):
            e = n * n / self.scale
        e.setflags(write=False)
        return e

    @cached_property
    def excitation_energies(self):
        """Read-only array ``[E_n - E_1]``; exact integers over ``scale``."""
        n = self.quantum_numbers
        with np.errstate(over="ignore"):
            e = (n * n - 1.0) / self.scale
        e.setflags(write=False)
        return e


def _check_index(spec, n, name="n"):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= spec.n_levels:
        raise DomainError(f"{name}={n} outside 1..{spec.n_levels}")
    return n


def energy_level(spec, n):
    """Energy of level ``n`` (1-based) in reduced units."""
    n = _check_index(spec, n)
    return n * n / spec.scale


def level_gap(spec, n_lower, n_upper):
    """``E[n_upper] - E[n_lower]``; requires ``n_lower < n_upper``."""
    n_lower = _check_index(spec, n_lower, "n_lower")
    n_upper = _check_index(spec, n_upper, "n_upper")
    if n_lower >= n_upper:
        raise DomainError(f"n_lower={n_lower} must be below n_upper={n_upper}")
    return (n_upper * n_upper - n_lower * n_lower) / spec.scale
