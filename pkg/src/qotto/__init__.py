"""Quantum Otto cycle of a particle in a 1D box with tunable effective mass."""

from ._validation import DomainError, NumericError
from .analysis import (
    OptimizationResult,
    SweepGrid,
    SweepRecord,
    SweepSeries,
    carnot_efficiency,
    classical_otto_r_carnot,
    default_mass_ratios,
    efficiency_sweep,
    feasible_mass_bracket,
    golden_section_max,
    optimize_mass_ratio,
)
from .cycle import (
    CycleResult,
    CycleState,
    OttoCycleSpec,
    Regime,
    classify_regime,
    extraction_condition,
    run_cycle,
    two_level_efficiency,
)
from .spectrum import BoxSpectrum, energy_level, level_gap
from .thermo import (
    ThermalState,
    choose_truncation,
    log_partition_function,
    mean_energy,
    partition_function,
    thermal_populations,
)

__version__ = "0.1.0"
