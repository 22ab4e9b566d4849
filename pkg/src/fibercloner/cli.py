"""Command-line harness: reproduce the design table, trade-off curves, phase
scans and Monte-Carlo runs as deterministic CSV files.

Configuration is a sectioned key=value file ([design]/[noise]/[run]/[output])
with command-line overrides; identical config + seed always produces
byte-identical output.  Angles are degrees in files and radians internally.

Exit codes: 0 success, 2 configuration error, 3 output I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .design import (
    PHASE_COVARIANT,
    UNIVERSAL,
    pc_tradeoff_curve,
    solve_reflectances,
    universal_tradeoff,
)
from .network import clone_fidelities_ideal
from .noise import NoiseModel, RunConfig, estimate_fidelities, simulate_run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

COMMANDS = ("design_table", "tradeoff", "phase_scan", "monte_carlo")
MODE_ANALYTIC = "analytic"
MODE_MONTE_CARLO = "monte_carlo"

_DEFAULT_Q = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
_DEFAULT_PHI = (0.0, 360.0, 20.0)
_CURVE_POINTS = 201
ENV_SEED = "CLONER_SEED"


class ConfigError(ValueError):
    """Invalid configuration file or override."""


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    q_values: tuple[float, ...] = _DEFAULT_Q
    phi_grid: tuple[float, float, float] = _DEFAULT_PHI  # start, stop, step in deg
    noise: NoiseModel = NoiseModel.ideal()
    run: RunConfig = RunConfig()
    output_path: str = "cloner_out.csv"
    mode: str = MODE_ANALYTIC

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.mode not in (MODE_ANALYTIC, MODE_MONTE_CARLO):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not self.q_values:
            raise ConfigError("q list must be nonempty")
        for q in self.q_values:
            if not 0.0 <= q <= 1.0:
                raise ConfigError(f"q={q} outside [0, 1]")
        start, stop, step = self.phi_grid
        if step <= 0 or stop < start:
            raise ConfigError(f"bad phase grid {self.phi_grid}")

    def phi_values_deg(self) -> list[float]:
        start, stop, step = self.phi_grid
        out = []
        k = 0
        while True:
            val = start + k * step
            if val > stop + 1e-9:
                return out
            out.append(val)
            k += 1


# ---------------------------------------------------------------------------
# configuration file parsing / serialization


def _parse_floats(text: str) -> tuple[float, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _get(parser, section, key, cast, fallback):
    if not parser.has_option(section, key):
        return fallback
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


def _noise_from_section(parser, base: NoiseModel) -> NoiseModel:
    if not parser.has_section("noise"):
        return base
    preset = _get(parser, "noise", "preset", str, None)
    if preset is not None:
        base = _noise_preset(preset.strip())
    arms = _get(parser, "noise", "arm_transmittances", _parse_floats, None)
    effs = _get(parser, "noise", "detector_efficiencies", _parse_floats, None)
    kwargs = {}
    for key in (
        "overlap_mu",
        "mz_overlap",
        "drift_rate_sigma",
        "stabilization_period_s",
        "stabilization_residual_sigma",
        "coupler_setting_error",
    ):
        val = _get(parser, "noise", key, float, None)
        if val is not None:
            kwargs[key] = val
    if arms is not None:
        if len(arms) != 4:
            raise ConfigError("arm_transmittances needs 4 values (A0, A1, B0, B1)")
        kwargs["arm_transmittances"] = dict(zip(("A0", "A1", "B0", "B1"), arms))
    if effs is not None:
        if len(effs) != 4:
            raise ConfigError("detector_efficiencies needs 4 values")
        kwargs["detector_efficiencies"] = tuple(effs)
    try:
        return replace(base, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _noise_preset(name: str) -> NoiseModel:
    if name == "ideal":
        return NoiseModel.ideal()
    if name == "paper":
        return NoiseModel.paper_like()
    raise ConfigError(f"unknown noise preset {name!r} (expected 'ideal' or 'paper')")


def _load_ini(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    return parser


def parse_config_file(path: str, command: str) -> ExperimentConfig:
    """Parse a sectioned config file into an ExperimentConfig for ``command``."""
    return config_from_parser(_load_ini(path), command)


def config_from_parser(parser: configparser.ConfigParser, command: str) -> ExperimentConfig:
    base = ExperimentConfig(command=command)
    q_values = _get(parser, "design", "q", _parse_floats, base.q_values)
    phi = (
        _get(parser, "design", "phi_start_deg", float, base.phi_grid[0]),
        _get(parser, "design", "phi_stop_deg", float, base.phi_grid[1]),
        _get(parser, "design", "phi_step_deg", float, base.phi_grid[2]),
    )
    noise = _noise_from_section(parser, base.noise)
    try:
        run = RunConfig(
            duration_s=_get(parser, "run", "duration_s", float, base.run.duration_s),
            pair_rate_hz=_get(parser, "run", "pair_rate_hz", float, base.run.pair_rate_hz),
            seed=_get(parser, "run", "seed", int, base.run.seed),
            repetitions=_get(parser, "run", "repetitions", int, base.run.repetitions),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mode = _get(parser, "run", "mode", str, base.mode).strip()
    output = _get(parser, "output", "path", str, base.output_path).strip()
    try:
        return ExperimentConfig(
            command=command,
            q_values=q_values,
            phi_grid=phi,
            noise=noise,
            run=run,
            output_path=output,
            mode=mode,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config back to the sectioned key=value format.  All fields are
    written explicitly, so parse(serialize(cfg)) reproduces cfg exactly."""
    n = cfg.noise
    arms = ", ".join(repr(n.arm_transmittances[k]) for k in ("A0", "A1", "B0", "B1"))
    effs = ", ".join(repr(v) for v in n.detector_efficiencies)
    lines = [
        "[design]",
        f"q = {', '.join(repr(q) for q in cfg.q_values)}",
        f"phi_start_deg = {cfg.phi_grid[0]!r}",
        f"phi_stop_deg = {cfg.phi_grid[1]!r}",
        f"phi_step_deg = {cfg.phi_grid[2]!r}",
        "",
        "[noise]",
        f"overlap_mu = {n.overlap_mu!r}",
        f"mz_overlap = {n.mz_overlap!r}",
        f"drift_rate_sigma = {n.drift_rate_sigma!r}",
        f"stabilization_period_s = {n.stabilization_period_s!r}",
        f"stabilization_residual_sigma = {n.stabilization_residual_sigma!r}",
        f"arm_transmittances = {arms}",
        f"detector_efficiencies = {effs}",
        f"coupler_setting_error = {n.coupler_setting_error!r}",
        "",
        "[run]",
        f"mode = {cfg.mode}",
        f"duration_s = {cfg.run.duration_s!r}",
        f"pair_rate_hz = {cfg.run.pair_rate_hz!r}",
        f"seed = {cfg.run.seed}",
        f"repetitions = {cfg.run.repetitions}",
        "",
        "[output]",
        f"path = {cfg.output_path}",
        "",
    ]
    return "\n".join(lines)


def parse_config_text(text: str, command: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config_from_parser(parser, command)


# ---------------------------------------------------------------------------
# row builders (pure; file writing is separate)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


def _derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def build_design_table(cfg: ExperimentConfig):
    header = ["q", "R0", "R1", "F_A_theory", "F_B_theory"]
    rows = []
    for q in cfg.q_values:
        d = solve_reflectances(q)
        rows.append([d.q, d.R0, d.R1, d.F_A_theory, d.F_B_theory])
    return header, rows


def _simulate_pooled(cfg: ExperimentConfig, q: float, q_index: int):
    """Monte-Carlo windows for one q pooled over the phase grid."""
    d = solve_reflectances(q)
    runs = []
    for pi, phi_deg in enumerate(cfg.phi_values_deg()):
        run_cfg = replace(cfg.run, seed=_derived_seed(cfg.run.seed, q_index, pi))
        runs.extend(simulate_run(d, math.radians(phi_deg), cfg.noise, run_cfg))
    return d, runs


def build_tradeoff(cfg: ExperimentConfig):
    header = ["family", "parameter", "F_A", "F_B", "err_A", "err_B"]
    rows = []
    for point in pc_tradeoff_curve(_CURVE_POINTS):
        rows.append([PHASE_COVARIANT, point.parameter, point.F_A, point.F_B, 0.0, 0.0])
    for k in range(_CURVE_POINTS):
        point = universal_tradeoff(k / (_CURVE_POINTS - 1))
        rows.append([UNIVERSAL, point.parameter, point.F_A, point.F_B, 0.0, 0.0])
    if cfg.mode == MODE_MONTE_CARLO:
        for qi, q in enumerate(cfg.q_values):
            _, runs = _simulate_pooled(cfg, q, qi)
            est = estimate_fidelities(runs, cfg.noise.detector_efficiencies)
            rows.append(["simulated", q, est.f_a, est.f_b, est.err_a, est.err_b])
    return header, rows


def build_phase_scan(cfg: ExperimentConfig):
    header = ["phi_deg", "F_A", "F_B", "err_A", "err_B"]
    q = cfg.q_values[0]
    d = solve_reflectances(q)
    rows = []
    for pi, phi_deg in enumerate(cfg.phi_values_deg()):
        phi = math.radians(phi_deg)
        if cfg.mode == MODE_ANALYTIC:
            f_a, f_b = clone_fidelities_ideal(d, phi)
            rows.append([phi_deg, f_a, f_b, 0.0, 0.0])
        else:
            run_cfg = replace(cfg.run, seed=_derived_seed(cfg.run.seed, 0, pi))
            runs = simulate_run(d, phi, cfg.noise, run_cfg)
            est = estimate_fidelities(runs, cfg.noise.detector_efficiencies)
            rows.append([phi_deg, est.f_a, est.f_b, est.err_a, est.err_b])
    return header, rows


def build_monte_carlo(cfg: ExperimentConfig):
    header = ["q", "F_A_sim", "F_B_sim", "err_A", "err_B", "success_rate"]
    rows = []
    n_phi = len(cfg.phi_values_deg())
    pairs_per_window = cfg.run.pair_rate_hz * cfg.run.duration_s
    for qi, q in enumerate(cfg.q_values):
        _, runs = _simulate_pooled(cfg, q, qi)
        est = estimate_fidelities(runs, cfg.noise.detector_efficiencies)
        total_pairs = pairs_per_window * cfg.run.repetitions * n_phi
        success_rate = est.raw_total / total_pairs if total_pairs > 0 else 0.0
        rows.append([q, est.f_a, est.f_b, est.err_a, est.err_b, success_rate])
    return header, rows


_BUILDERS = {
    "design_table": build_design_table,
    "tradeoff": build_tradeoff,
    "phase_scan": build_phase_scan,
    "monte_carlo": build_monte_carlo,
}


def rows_to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def run_command(cfg: ExperimentConfig) -> str:
    header, rows = _BUILDERS[cfg.command](cfg)
    return rows_to_csv(header, rows)


# ---------------------------------------------------------------------------
# argument parsing and entry point


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloner",
        description="Asymmetric phase-covariant cloner: design tables, "
        "trade-off curves, phase scans and Monte-Carlo coincidence runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("design_table", "coupler reflectances and theoretical fidelities per q"),
        ("tradeoff", "F_B vs F_A curves, optionally with simulated points"),
        ("phase_scan", "fidelities vs input phase for the first configured q"),
        ("monte_carlo", "simulated fidelities and success rate per q"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="sectioned key=value configuration file")
        p.add_argument("--q", help="comma-separated asymmetry values, e.g. 0.5,0.7")
        p.add_argument("--phi-step", type=float, help="phase grid step in degrees")
        p.add_argument("--seed", type=int, help="random seed override")
        p.add_argument(
            "--preset",
            choices=("paper", "ideal"),
            help="noise preset: 'paper' (experiment-like, Monte-Carlo mode) "
            "or 'ideal' (noise-free, analytic mode)",
        )
        p.add_argument("--out", help="output CSV path")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.q is not None:
        cfg = replace(cfg, q_values=_parse_floats(args.q))
    if args.phi_step is not None:
        start, stop, _ = cfg.phi_grid
        cfg = replace(cfg, phi_grid=(start, stop, float(args.phi_step)))
    if args.preset is not None:
        mode = MODE_MONTE_CARLO if args.preset == "paper" else MODE_ANALYTIC
        cfg = replace(cfg, noise=_noise_preset(args.preset), mode=mode)
    if args.seed is not None:
        cfg = replace(cfg, run=replace(cfg.run, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output_path=args.out)
    return cfg


def _seed_from_env(cfg: ExperimentConfig, had_explicit_seed: bool) -> ExperimentConfig:
    if had_explicit_seed:
        return cfg
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return cfg
    try:
        return replace(cfg, run=replace(cfg.run, seed=int(raw)))
    except ValueError as exc:
        raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}") from exc


def main(argv=None) -> int:
    parser = _build_arg_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            ini = _load_ini(args.config)
            cfg = config_from_parser(ini, args.command)
            file_had_seed = ini.has_option("run", "seed")
        else:
            cfg = ExperimentConfig(command=args.command)
            file_had_seed = False
        cfg = _seed_from_env(cfg, had_explicit_seed=file_had_seed or args.seed is not None)
        cfg = _apply_overrides(cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        text = run_command(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def console_entry() -> None:
    sys.exit(main())
