"""Command-line front end: ``qotto {levels,cycle,sweep,optimize}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numeric failure.
"""

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import mpmath

from ._validation import DomainError, NumericError
from .analysis import (
    default_mass_ratios,
    efficiency_sweep,
    feasible_mass_bracket,
    optimize_mass_ratio,
)
from .cycle import OttoCycleSpec, run_cycle
from .thermo import thermal_populations

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "dump_config",
    "emit_levels",
    "emit_cycle",
    "emit_sweep",
    "emit_optimization",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

SUBCOMMANDS = ("levels", "cycle", "sweep", "optimize")
FORMATS = ("csv", "jsonl", "human")
CONFIG_ENV = "QOTTO_CONFIG"


class ConfigError(Exception):
    """Bad command line or config file."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str = "cycle"
    m_h: float = 1.0
    m_c: float = 2.0
    l_h: float = 1.0
    l_c: float = 1.0
    t_h: float = 10.0
    t_c: float = 1.0
    n_levels: Optional[int] = None
    ratios: Optional[tuple] = None
    r: tuple = (0.5, 4.0, 200)
    gamma: float = 3.0
    bracket: Optional[tuple] = None
    tol: float = 1e-9
    output: Optional[str] = None
    format: str = "csv"

    def cycle_spec(self):
        return OttoCycleSpec(
            self.m_h, self.m_c, self.l_h, self.l_c, self.t_h, self.t_c, self.n_levels
        )


# keys accepted in a config file, in dump order
CONFIG_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "subcommand")
PHYSICAL_KEYS = ("m_h", "m_c", "l_h", "l_c", "t_h", "t_c")


def _g(x):
    if isinstance(x, mpmath.mpf):
        # below the double range; keep the exponent
        return mpmath.nstr(x, 12, min_fixed=-4, max_fixed=12)
    # + 0.0 folds -0.0 into 0.0
    return format(float(x) + 0.0, ".12g")


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _positive(text):
    value = _float(text)
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"must be positive and finite, got {text!r}")
    return value


def _n_levels(text):
    text = text.strip()
    if text == "auto":
        return None
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"not an integer or 'auto': {text!r}") from None
    if n < 2:
        raise ConfigError(f"must be >= 2, got {n}")
    return n


def _ratios(text):
    text = text.strip()
    if text == "auto":
        return None
    return tuple(_positive(t) for t in text.split(","))


def _r_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected lo:hi:count, got {text!r}")
    lo, hi = _positive(parts[0]), _positive(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"count is not an integer: {parts[2]!r}") from None
    if hi <= lo or count < 2:
        raise ConfigError(f"need lo < hi and count >= 2, got {text!r}")
    return lo, hi, count


def _bracket(text):
    text = text.strip()
    if text == "auto":
        return None
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"expected lo:hi, got {text!r}")
    lo, hi = _positive(parts[0]), _positive(parts[1])
    if hi <= lo:
        raise ConfigError(f"need lo < hi, got {text!r}")
    return lo, hi


def _format(text):
    text = text.strip()
    if text not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {text!r}")
    return text


def _output(text):
    text = text.strip()
    return text or None


PARSERS = {
    "m_h": _positive,
    "m_c": _positive,
    "l_h": _positive,
    "l_c": _positive,
    "t_h": _positive,
    "t_c": _positive,
    "n_levels": _n_levels,
    "ratios": _ratios,
    "r": _r_range,
    "gamma": _float,
    "bracket": _bracket,
    "tol": _positive,
    "output": _output,
    "format": _format,
}


def _render(key, value):
    if value is None:
        return "" if key == "output" else "auto"
    if key == "ratios":
        return ",".join(_g(v) for v in value)
    if key in ("r", "bracket"):
        return ":".join(str(v) if isinstance(v, int) else _g(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, text = (part.strip() for part in line.partition("="))
        if key not in PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = PARSERS[key](text)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {key}: {exc}") from None
    return values


def dump_config(config):
    """Config-file text that :func:`parse_config` reads back to ``config``."""
    lines = ["# qotto configuration"]
    lines += [f"{key} = {_render(key, getattr(config, key))}" for key in CONFIG_KEYS]
    return "\n".join(lines) + "\n"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _flag(parser_fn):
    def convert(text):
        try:
            return parser_fn(text)
        except ConfigError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    convert.__name__ = parser_fn.__name__.lstrip("_")
    return convert


def build_parser():
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (fallback: ${CONFIG_ENV})")
    common.add_argument("--output", "-o", type=_flag(_output), help="output path (default stdout)")
    common.add_argument("--format", type=_flag(_format), help="csv, jsonl or human")
    for key, label in (
        ("m_h", "effective mass at the hot stage"),
        ("m_c", "effective mass at the cold stage"),
        ("l_h", "well width at the hot stage"),
        ("l_c", "well width at the cold stage"),
        ("t_h", "hot bath temperature"),
        ("t_c", "cold bath temperature"),
    ):
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=_flag(_positive), help=label)
    common.add_argument("--n-levels", dest="n_levels", type=_flag(_n_levels), help="level count or 'auto'")

    parser = _ArgumentParser(prog="qotto", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("levels", parents=[common], help="energy levels and thermal populations")
    sub.add_parser("cycle", parents=[common], help="heat, work and efficiency of one cycle")
    sweep = sub.add_parser("sweep", parents=[common], help="efficiency vs compression ratio")
    sweep.add_argument("--ratios", type=_flag(_ratios), help="comma-separated m_h/m_c values")
    sweep.add_argument("--r", type=_flag(_r_range), help="compression-ratio grid lo:hi:count")
    sweep.add_argument("--gamma", type=_flag(_float), help="heat-capacity ratio of the classical baseline")
    opt = sub.add_parser("optimize", parents=[common], help="maximize extracted work over m_c")
    opt.add_argument("--bracket", type=_flag(_bracket), help="m_c search interval lo:hi")
    opt.add_argument("--tol", type=_flag(_positive), help="final bracket width")
    return parser


def parse_config(argv, environ=None):
    """Build a :class:`RunConfig` from argv, a config file and defaults.

    Precedence: flags, then ``--config`` (or ``$QOTTO_CONFIG``), then defaults.
    """
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    config_path = args.config or environ.get(CONFIG_ENV)
    values = read_config_file(config_path) if config_path else {}
    for key in CONFIG_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    config = replace(RunConfig(subcommand=args.subcommand), **values)
    if config.subcommand == "sweep" and not config.t_h > config.t_c:
        raise ConfigError("sweep needs t_h > t_c")
    if config.subcommand == "optimize" and config.bracket is None and not config.t_h > config.t_c:
        raise ConfigError("optimize needs t_h > t_c for the default bracket")
    return config


# -- emitters ---------------------------------------------------------------


def _csv(rows):
    return "".join(",".join(row) + "\n" for row in rows)


def _json_number(x):
    """12-digit float; values beyond the double range stay as strings."""
    if x is None:
        return None
    if isinstance(x, mpmath.mpf):
        return _g(x)
    return float(_g(x))


def _jsonl(objects):
    return "".join(json.dumps(obj, separators=(",", ":")) + "\n" for obj in objects)


def _table(header, rows, left=0):
    """Right-aligned text table; the first ``left`` columns align left."""
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    out = io.StringIO()
    for row in [header, *rows]:
        cells = [
            cell.ljust(w) if i < left else cell.rjust(w)
            for i, (cell, w) in enumerate(zip(row, widths))
        ]
        out.write("  ".join(cells).rstrip() + "\n")
    return out.getvalue()


def emit_levels(spec, fmt="csv"):
    """Energies of both spectra and their equilibrium populations."""
    hot, cold = spec.hot_spectrum, spec.cold_spectrum
    p_hot = thermal_populations(hot, spec.T_h).populations
    p_cold = thermal_populations(cold, spec.T_c).populations
    header = ["n", "energy_hot", "energy_cold", "p_hot", "p_cold"]
    rows = [
        [str(n), _g(hot.energies[n - 1]), _g(cold.energies[n - 1]), _g(p_hot[n - 1]), _g(p_cold[n - 1])]
        for n in range(1, spec.n_levels + 1)
    ]
    if fmt == "jsonl":
        return _jsonl(
            {
                "n": n,
                "energy_hot": _json_number(hot.energies[n - 1]),
                "energy_cold": _json_number(cold.energies[n - 1]),
                "p_hot": _json_number(p_hot[n - 1]),
                "p_cold": _json_number(p_cold[n - 1]),
            }
            for n in range(1, spec.n_levels + 1)
        )
    if fmt == "human":
        return _table(header, rows)
    return _csv([header, *rows])


def emit_cycle(result, fmt="csv"):
    values = {
        "q_hot": result.q_hot,
        "q_cold": result.q_cold,
        "work": result.work,
        "work_extracted": result.work_extracted,
        "efficiency": result.efficiency,
    }
    if fmt == "jsonl":
        obj = {k: _json_number(v) for k, v in values.items()}
        obj["regime"] = str(result.regime)
        return _jsonl([obj])
    cells = ["" if v is None else _g(v) for v in values.values()]
    if fmt == "csv":
        return _csv([[*values, "regime"], [*cells, str(result.regime)]])

    out = io.StringIO()
    width = max(len(k) for k in values)
    for key, cell in zip(values, cells):
        out.write(f"{key.ljust(width)}  {cell or '-'}\n")
    out.write(f"{'regime'.ljust(width)}  {result.regime}\n\n")
    n_levels = result.states[0].spectrum.n_levels
    header = ["stage", "mass", "length", *(f"p{n}" for n in range(1, n_levels + 1))]
    rows = [
        [s.label + ":", _g(s.spectrum.mass), _g(s.spectrum.length), *(_g(p) for p in s.thermal.populations)]
        for s in result.states
    ]
    out.write(_table(header, rows, left=1))
    return out.getvalue()


SWEEP_HEADER = ["series", "r", "eta", "eta_over_carnot", "work_extracted", "regime"]


def emit_sweep(grid, fmt="csv"):
    rows = [
        [s.label, _g(rec.axis_value), _g(rec.efficiency), _g(rec.efficiency_over_carnot),
         _g(rec.work_extracted), str(rec.regime)]
        for s in grid.series
        for rec in s.records
    ]
    if fmt == "jsonl":
        return _jsonl(
            {
                "series": row[0],
                "r": _json_number(rec.axis_value),
                "eta": _json_number(rec.efficiency),
                "eta_over_carnot": _json_number(rec.efficiency_over_carnot),
                "work_extracted": _json_number(rec.work_extracted),
                "regime": row[5],
            }
            for row, rec in zip(rows, (rec for s in grid.series for rec in s.records))
        )
    if fmt == "human":
        return _table(SWEEP_HEADER, rows, left=1)
    return _csv([SWEEP_HEADER, *rows])


OPT_HEADER = ["best_m_c", "best_mass_ratio", "best_work_extracted", "evaluations", "bracket_lo", "bracket_hi", "regime"]


def emit_optimization(result, fmt="csv"):
    cells = [
        _g(result.best_m_c),
        _g(result.best_mass_ratio),
        _g(result.best_work_extracted),
        str(result.evaluations),
        _g(result.bracket[0]),
        _g(result.bracket[1]),
        str(result.regime),
    ]
    if fmt == "jsonl":
        obj = dict(zip(OPT_HEADER, cells))
        for key in OPT_HEADER[:3] + OPT_HEADER[4:6]:
            obj[key] = float(obj[key])
        obj["evaluations"] = result.evaluations
        return _jsonl([obj])
    if fmt == "human":
        width = max(map(len, OPT_HEADER))
        return "".join(f"{k.ljust(width)}  {v}\n" for k, v in zip(OPT_HEADER, cells))
    return _csv([OPT_HEADER, cells])


# -- dispatch ---------------------------------------------------------------


def execute(config):
    """Run the configured subcommand and return its text output."""
    if config.subcommand == "levels":
        return emit_levels(config.cycle_spec(), config.format)
    if config.subcommand == "cycle":
        return emit_cycle(run_cycle(config.cycle_spec()), config.format)
    if config.subcommand == "sweep":
        ratios = config.ratios or default_mass_ratios(config.t_c, config.t_h)
        grid = efficiency_sweep(
            ratios, config.r, config.t_c, config.t_h, config.gamma,
            m_h=config.m_h, L_h=config.l_h, n_levels=config.n_levels,
        )
        return emit_sweep(grid, config.format)
    if config.subcommand == "optimize":
        r = config.l_c / config.l_h
        bracket = config.bracket or feasible_mass_bracket(config.m_h, r, config.t_h, config.t_c)
        result = optimize_mass_ratio(
            r, config.t_h, config.t_c, bracket,
            m_h=config.m_h, L_h=config.l_h, n_levels=config.n_levels, tol=config.tol,
        )
        return emit_optimization(result, config.format)
    raise ConfigError(f"unknown subcommand {config.subcommand!r}")


def main(argv=None, environ=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv, environ)
        text = execute(config)
    except ConfigError as exc:
        print(f"qotto: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"qotto: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (NumericError, OverflowError, FloatingPointError) as exc:
        print(f"qotto: numeric failure: {exc}", file=stderr)
        return EXIT_NUMERIC

    if config.output is None:
        stdout.write(text)
        return EXIT_OK
    try:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"qotto: cannot write {config.output}: {exc.strerror}", file=stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
