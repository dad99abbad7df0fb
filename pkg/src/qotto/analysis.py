"""Efficiency sweeps, classical baselines and mass-ratio optimization."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_finite_positive
from .cycle import OttoCycleSpec, Regime, run_cycle, two_level_efficiency

__all__ = [
    "carnot_efficiency",
    "classical_otto_r_carnot",
    "default_mass_ratios",
    "SweepRecord",
    "SweepSeries",
    "SweepGrid",
    "efficiency_sweep",
    "OptimizationResult",
    "feasible_mass_bracket",
    "golden_section_max",
    "optimize_mass_ratio",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def carnot_efficiency(T_c, T_h):
    T_c = check_finite_positive(T_c, "T_c")
    T_h = check_finite_positive(T_h, "T_h")
    if T_c > T_h:
        raise DomainError(f"T_c={T_c} exceeds T_h={T_h}")
    return 1.0 - T_c / T_h


def classical_otto_r_carnot(T_c, T_h, gamma=3.0):
    """Compression ratio at which a classical Otto engine reaches Carnot.

    Solves ``1 - r**(1 - gamma) = 1 - T_c/T_h`` for ``r``.
    """
    T_c = check_finite_positive(T_c, "T_c")
    T_h = check_finite_positive(T_h, "T_h")
    if not T_c < T_h:
        raise DomainError(f"need T_c < T_h, got T_c={T_c}, T_h={T_h}")
    if not gamma > 1:
        raise DomainError(f"gamma must exceed 1, got {gamma!r}")
    return (T_h / T_c) ** (1.0 / (gamma - 1.0))


def default_mass_ratios(T_c, T_h):
    """``m_h/m_c`` values for the standard sweep, ascending.

    Brackets the constant-mass curve from both sides and adds ``T_c/T_h``,
    the ratio that reaches Carnot efficiency at ``r = 1``.
    """
    return sorted({0.25, 0.5, 1.0, 2.0, T_c / T_h})


@dataclass(frozen=True)
class SweepRecord:
    axis_value: float
    efficiency: float
    efficiency_over_carnot: float
    work_extracted: float
    regime: Regime


@dataclass(frozen=True)
class SweepSeries:
    label: str
    mass_ratio: float
    records: tuple


@dataclass(frozen=True)
class SweepGrid:
    axis_name: str
    axis_values: tuple
    series: tuple

    def __post_init__(self):
        axis = self.axis_values
        if any(b <= a for a, b in zip(axis, axis[1:])):
            raise DomainError("axis_values must be strictly increasing")
        for s in self.series:
            if len(s.records) != len(axis):
                raise DomainError(f"series {s.label!r} does not match the axis length")

    def column(self, label, attr):
        """One attribute of one series as an array, e.g. ``"efficiency_over_carnot"``."""
        for s in self.series:
            if s.label == label:
                return np.array([getattr(rec, attr) for rec in s.records], dtype=float)
        raise KeyError(label)


def _series_label(ratio):
    return f"{ratio:.12g}"


def efficiency_sweep(
    mass_ratios,
    r_range,
    T_c,
    T_h,
    gamma=3.0,
    m_h=1.0,
    L_h=1.0,
    n_levels=2,
):
    """Tabulate efficiency against the compression ratio ``r = L_c/L_h``.

    ``r_range`` is ``(lo, hi, count)`` for a uniform grid including both ends.
    Each record holds the gap-ratio efficiency at ``m_h/m_c = ratio`` and its
    fraction of Carnot, plus ``work_extracted`` and the regime from a full
    cycle run at ``(m_h, m_h/ratio, L_h, r*L_h, T_h, T_c, n_levels)``.
    ``n_levels=None`` truncates each cycle automatically.  Records with
    nonpositive efficiency are kept.
    """
    lo, hi, count = r_range
    lo = check_finite_positive(lo, "r lo")
    hi = check_finite_positive(hi, "r hi")
    if not hi > lo:
        raise DomainError(f"r range needs hi > lo, got {lo}..{hi}")
    if int(count) != count or count < 2:
        raise DomainError(f"r count must be an integer >= 2, got {count!r}")
    if not T_h > T_c:
        raise DomainError(f"sweep needs T_h > T_c, got T_h={T_h}, T_c={T_c}")
    eta_carnot = carnot_efficiency(T_c, T_h)
    # gamma only sets the classical baseline; validate it here all the same
    classical_otto_r_carnot(T_c, T_h, gamma)

    axis = tuple(float(r) for r in np.linspace(lo, hi, int(count)))
    series = []
    for ratio in mass_ratios:
        ratio = check_finite_positive(ratio, "mass ratio")
        records = []
        for r in axis:
            eta = two_level_efficiency(ratio, 1.0, 1.0, r)
            result = run_cycle(OttoCycleSpec(m_h, m_h / ratio, L_h, r * L_h, T_h, T_c, n_levels))
            records.append(
                SweepRecord(r, eta, eta / eta_carnot, result.work_extracted, result.regime)
            )
        series.append(SweepSeries(_series_label(ratio), ratio, tuple(records)))
    return SweepGrid("compression_ratio", axis, tuple(series))


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a search over the cold-stage mass ``m_c``.

    ``bracket`` is in units of ``m_c``; ``best_mass_ratio`` is ``m_h / best_m_c``.
    ``regime`` is ``IDLE`` when no sample in the bracket runs as an engine.
    """

    best_m_c: float
    best_mass_ratio: float
    best_work_extracted: float
    evaluations: int
    bracket: tuple
    regime: Regime


def feasible_mass_bracket(m_h, r, T_h, T_c):
    """Open interval of ``m_c`` where the two-level cycle extracts work.

    From ``1 < Delta_h/Delta_c = (m_c/m_h) r**2 < T_h/T_c``.
    """
    m_h = check_finite_positive(m_h, "m_h")
    r = check_finite_positive(r, "r")
    if not T_h > T_c:
        raise DomainError(f"need T_h > T_c, got T_h={T_h}, T_c={T_c}")
    lo = m_h / (r * r)
    return lo, lo * (T_h / T_c)


def golden_section_max(f, a, b, tol):
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x), evaluations)`` where ``x`` is the best point probed;
    the final bracket has width ``<= tol``.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    return (c, fc, evals) if fc >= fd else (d, fd, evals)


def optimize_mass_ratio(
    r,
    T_h,
    T_c,
    bracket,
    m_h=1.0,
    L_h=1.0,
    n_levels=2,
    tol=1e-9,
    grid_points=64,
):
    """Maximize ``work_extracted`` over ``m_c`` at fixed everything else.

    A uniform grid of ``grid_points`` samples over ``bracket`` locates the
    best sample; golden-section search then refines inside its neighbouring
    grid cells.  The result never falls below the best grid sample.
    """
    lo, hi = (check_finite_positive(v, "bracket") for v in bracket)
    if not hi > lo:
        raise DomainError(f"bracket needs hi > lo, got {lo}..{hi}")
    if grid_points < 64:
        raise DomainError(f"grid_points must be >= 64, got {grid_points}")
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    r = check_finite_positive(r, "r")
    L_c = r * L_h

    def run(m_c):
        return run_cycle(OttoCycleSpec(m_h, m_c, L_h, L_c, T_h, T_c, n_levels))

    def objective(m_c):
        res = run(m_c)
        return res.work_extracted if res.regime is Regime.ENGINE else 0.0

    grid = np.linspace(lo, hi, grid_points)
    values = [objective(m) for m in grid]
    evaluations = len(values)
    best = int(np.argmax(values))
    if values[best] <= 0.0:
        return OptimizationResult(lo, m_h / lo, 0.0, evaluations, (lo, hi), Regime.IDLE)

    best_x, best_w = float(grid[best]), values[best]
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, grid_points - 1)]
    x, w, n = golden_section_max(objective, a, b, tol)
    evaluations += n
    if w > best_w:
        best_x, best_w = float(x), w
    return OptimizationResult(
        best_x, m_h / best_x, best_w, evaluations, (lo, hi), Regime.ENGINE
    )
