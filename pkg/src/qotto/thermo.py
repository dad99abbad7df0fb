"""Canonical-ensemble statistics of a single particle over a box spectrum.

Temperatures are in the reduced energy unit with k_B == 1.  All Boltzmann
weights are taken relative to the ground level, so nothing underflows until
the excited populations themselves drop below the double-precision range.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_positive

__all__ = [
    "ThermalState",
    "log_partition_function",
    "partition_function",
    "thermal_populations",
    "mean_energy",
    "choose_truncation",
    "DEFAULT_TAIL_TOLERANCE",
]

DEFAULT_TAIL_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Normalized level populations and the bath temperature that set them."""

    populations: np.ndarray
    temperature: float

    def __post_init__(self):
        p = np.array(self.populations, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("populations must be a non-empty 1D sequence")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise DomainError("populations must lie in [0, 1]")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise DomainError(f"populations sum to {math.fsum(p)!r}, not 1")
        if not self.temperature >= 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature!r}")
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)
        object.__setattr__(self, "temperature", float(self.temperature))

    @property
    def n_levels(self):
        return self.populations.size

    def __eq__(self, other):
        if not isinstance(other, ThermalState):
            return NotImplemented
        return (
            self.temperature == other.temperature
            and np.array_equal(self.populations, other.populations)
        )

    __hash__ = None


def _shifted_weights(spec, T):
    # exp(-(E_n - E_1)/T); the ground weight is exactly 1
    return np.exp(-spec.excitation_energies / T)


def log_partition_function(spec, T):
    """``log Z``; finite even when ``Z`` itself underflows."""
    T = check_positive(T, "T")
    return -spec.energies[0] / T + math.log(math.fsum(_shifted_weights(spec, T)))


def partition_function(spec, T):
    """``Z = sum_n exp(-E_n / T)`` over the retained levels.

    The ground factor ``exp(-E_1 / T)`` is pulled out of the sum, so the
    reduced sum is always in ``[1, N]``.  ``Z`` may still underflow to 0 for
    ``T << E_1``; use :func:`log_partition_function` there.
    """
    T = check_positive(T, "T")
    return math.exp(-spec.energies[0] / T) * math.fsum(_shifted_weights(spec, T))


def thermal_populations(spec, T):
    """Gibbs populations ``p_n = exp(-E_n/T) / Z``.

    ``T == 0`` returns the ground state; ``T == inf`` the uniform state.
    """
    T = float(T)
    if math.isnan(T) or T < 0:
        raise DomainError(f"T must be >= 0, got {T!r}")
    if T == 0:
        p = np.zeros(spec.n_levels)
        p[0] = 1.0
    else:
        w = _shifted_weights(spec, T)
        p = w / math.fsum(w)
    return ThermalState(p, T)


def mean_energy(spec, state):
    """``<H> = sum_n E_n p_n``."""
    if state.n_levels != spec.n_levels:
        raise DomainError(
            f"state has {state.n_levels} populations, spectrum has {spec.n_levels} levels"
        )
    return math.fsum(spec.energies * state.populations)


def choose_truncation(mass, length, T_max, tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    """Smallest ``N >= 2`` with ``exp(-(E_{N+1} - E_1) / T_max) < tail_tolerance``.

    Every discarded level then carries less than ``tail_tolerance`` Boltzmann
    weight relative to the ground state at the hottest temperature used.
    """
    mass = check_positive(mass, "mass")
    length = check_positive(length, "length")
    T_max = check_positive(T_max, "T_max")
    if not 0 < tail_tolerance < 1:
        raise DomainError(f"tail_tolerance must be in (0, 1), got {tail_tolerance!r}")
    if math.isinf(T_max):
        raise DomainError("T_max must be finite")
    scale = mass * length * length

    def discarded_weight(n):
        return math.exp(-((n + 1) ** 2 - 1) / scale / T_max)

    # (N+1)^2 > 1 + scale*T_max*ln(1/tol); start just below and step up
    threshold = 1.0 + scale * T_max * -math.log(tail_tolerance)
    n = max(2, int(math.isqrt(int(threshold))) - 2)
    while n > 2 and discarded_weight(n - 1) < tail_tolerance:
        n -= 1
    while discarded_weight(n) >= tail_tolerance:
        n += 1
    return n
