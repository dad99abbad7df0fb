"""Four-stroke quantum Otto cycle with effective-mass and width strokes.

Stage A: equilibrium with the hot bath on the hot spectrum (m_h, L_h).
Stage B: after the adiabatic stroke to (m_c, L_c); populations carried over.
Stage C: equilibrium with the cold bath on the cold spectrum.
Stage D: after the adiabatic return to (m_h, L_h); populations carried over.

Sign convention: heats are positive into the working substance and
``work = -q_hot - q_cold``, so ``work < 0`` means work is extracted.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from ._validation import (
    DomainError,
    NumericError,
    check_finite_positive,
    check_level_count,
)
from .spectrum import BoxSpectrum, level_gap
from .thermo import ThermalState, choose_truncation, thermal_populations

__all__ = [
    "Regime",
    "OttoCycleSpec",
    "CycleState",
    "CycleResult",
    "run_cycle",
    "two_level_efficiency",
    "extraction_condition",
    "classify_regime",
    "REGIME_RTOL",
]

REGIME_RTOL = 1e-12

# Below this the excited populations lose precision (subnormal) or vanish,
# so the heat sums are redone with an unbounded exponent range.
UNDERFLOW_GUARD = 1e-290
EXTENDED_DPS = 30


class Regime(str, Enum):
    ENGINE = "engine"
    REFRIGERATOR = "refrigerator"
    HEATER = "heater"
    ACCELERATOR = "accelerator"
    IDLE = "idle"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OttoCycleSpec:
    """Physical knobs of one cycle.

    ``n_levels=None`` picks the truncation from :func:`choose_truncation`,
    taking the larger of the values needed by the hot spectrum at ``T_h`` and
    the cold spectrum at ``T_c``.  ``T_h < T_c`` is allowed.
    """

    m_h: float
    m_c: float
    L_h: float
    L_c: float
    T_h: float
    T_c: float
    n_levels: Optional[int] = None

    def __post_init__(self):
        for name in ("m_h", "m_c", "L_h", "L_c", "T_h", "T_c"):
            object.__setattr__(self, name, check_finite_positive(getattr(self, name), name))
        if self.n_levels is None:
            n = max(
                choose_truncation(self.m_h, self.L_h, self.T_h),
                choose_truncation(self.m_c, self.L_c, self.T_c),
            )
        else:
            n = check_level_count(self.n_levels)
        object.__setattr__(self, "n_levels", n)

    @property
    def compression_ratio(self):
        """``r = L_c / L_h``."""
        return self.L_c / self.L_h

    @property
    def mass_ratio(self):
        """``m_h / m_c``."""
        return self.m_h / self.m_c

    @property
    def hot_spectrum(self):
        return BoxSpectrum(self.m_h, self.L_h, self.n_levels)

    @property
    def cold_spectrum(self):
        return BoxSpectrum(self.m_c, self.L_c, self.n_levels)

    def swapped(self):
        """The same cycle with the roles of the two stages exchanged."""
        return OttoCycleSpec(
            self.m_c, self.m_h, self.L_c, self.L_h, self.T_c, self.T_h, self.n_levels
        )


class CycleState(NamedTuple):
    label: str
    spectrum: BoxSpectrum
    thermal: ThermalState


@dataclass(frozen=True)
class CycleResult:
    """Heat/work ledger of one cycle.

    ``q_hot``, ``q_cold`` and ``work`` are floats, except when every excited
    population sits below ``UNDERFLOW_GUARD``: they are then ``mpmath.mpf``
    values that may be far smaller than any double.
    """

    q_hot: float
    q_cold: float
    work: float
    efficiency: Optional[float]
    regime: Regime
    states: tuple = field(repr=False)

    @property
    def work_extracted(self):
        return -self.work

    def state(self, label):
        for s in self.states:
            if s.label == label:
                return s
        raise KeyError(label)


def two_level_efficiency(m_h, m_c, L_h, L_c):
    """``1 - (m_h/m_c) * (L_h/L_c)**2``, the gap ratio ``1 - Delta_c/Delta_h``.

    For the box spectrum every level scales by the same factor, so this is
    also the efficiency of the full multi-level cycle whenever ``q_hot > 0``.
    Values ``<= 0`` mean the parameters cannot run an engine.
    """
    m_h = check_finite_positive(m_h, "m_h")
    m_c = check_finite_positive(m_c, "m_c")
    L_h = check_finite_positive(L_h, "L_h")
    L_c = check_finite_positive(L_c, "L_c")
    return 1.0 - (m_h / m_c) * (L_h / L_c) ** 2


def extraction_condition(spec):
    """True iff ``T_h/T_c > Delta_h/Delta_c > 1`` on the two lowest levels."""
    gap_ratio = level_gap(spec.hot_spectrum, 1, 2) / level_gap(spec.cold_spectrum, 1, 2)
    return spec.T_h / spec.T_c > gap_ratio > 1.0


def classify_regime(q_hot, q_cold, work, zero_tol=None):
    """Label the sign pattern of ``(q_hot, q_cold, work)``.

    ``zero_tol`` defaults to ``REGIME_RTOL`` times the largest magnitude; a
    quantity within it counts as zero and yields ``IDLE``.  Sign patterns
    outside the four operating regimes (reachable only with ``T_h < T_c`` or
    with inconsistent input) are also reported as ``IDLE``.
    """
    if zero_tol is None:
        zero_tol = REGIME_RTOL * max(abs(q_hot), abs(q_cold), abs(work))
    if zero_tol < 0:
        raise DomainError(f"zero_tol must be nonnegative, got {zero_tol!r}")
    if min(abs(q_hot), abs(q_cold), abs(work)) <= zero_tol:
        return Regime.IDLE
    if work < 0:
        if q_hot > 0 and q_cold < 0:
            return Regime.ENGINE
        return Regime.IDLE
    if q_cold > 0 and q_hot < 0:
        return Regime.REFRIGERATOR
    if q_hot < 0 and q_cold < 0:
        return Regime.HEATER
    if q_hot > 0 and q_cold < 0:
        return Regime.ACCELERATOR
    return Regime.IDLE


def _check_finite(stage, *values):
    for v in values:
        finite = np.all(np.isfinite(v)) if isinstance(v, np.ndarray) else mpmath.isfinite(v)
        if not finite:
            raise NumericError(f"non-finite value at {stage}")


def _extended_heats(hot, cold, T_h, T_c):
    with mpmath.workdps(EXTENDED_DPS):

        def excited_populations(excitations, T):
            w = [mpmath.exp(-mpmath.mpf(float(e)) / T) for e in excitations]
            z = mpmath.fsum(w)
            return [x / z for x in w[1:]]

        p_a = excited_populations(hot.excitation_energies, T_h)
        p_c = excited_populations(cold.excitation_energies, T_c)
        dp = [a - c for a, c in zip(p_a, p_c)]
        q_hot = mpmath.fsum(float(e) * d for e, d in zip(hot.excitation_energies[1:], dp))
        q_cold = -mpmath.fsum(float(e) * d for e, d in zip(cold.excitation_energies[1:], dp))
    return q_hot, q_cold


def run_cycle(spec):
    """Run one cycle and return its heat/work ledger."""
    hot = spec.hot_spectrum
    cold = spec.cold_spectrum
    _check_finite("spectra", hot.energies, cold.energies)

    state_a = thermal_populations(hot, spec.T_h)
    state_c = thermal_populations(cold, spec.T_c)
    _check_finite("stage A populations", state_a.populations)
    _check_finite("stage C populations", state_c.populations)
    # adiabatic strokes preserve populations
    state_b = state_a
    state_d = state_c

    if max(state_a.populations[1], state_c.populations[1]) < UNDERFLOW_GUARD:
        q_hot, q_cold = _extended_heats(hot, cold, spec.T_h, spec.T_c)
    else:
        # Sum over excited levels against E_n - E_1; the ground term drops out
        # by normalization and is the worst cancellation at low temperature.
        dp = state_a.populations[1:] - state_c.populations[1:]
        q_hot = math.fsum(hot.excitation_energies[1:] * dp)
        q_cold = -math.fsum(cold.excitation_energies[1:] * dp)
        _check_finite("heat sums", q_hot, q_cold)
    work = -q_hot - q_cold
    _check_finite("work", work)

    regime = classify_regime(q_hot, q_cold, work)
    efficiency = float(-work / q_hot) if regime is Regime.ENGINE else None
    states = (
        CycleState("A", hot, state_a),
        CycleState("B", cold, state_b),
        CycleState("C", cold, state_c),
        CycleState("D", hot, state_d),
    )
    return CycleResult(q_hot, q_cold, work, efficiency, regime, states)
