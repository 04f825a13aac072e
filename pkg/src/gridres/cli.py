"""Command-line pipeline: simulate -> risk -> score, plus a self-check.

Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 failed
self-check (`verify`).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, default_weight_cases, load_run_config, write_manifest
from .engine import PARAMETER_NAMES, ScenarioStats, run_all_scenarios
from .mcdm import build_measure, resilience_metric, shapley
from .network import NetworkFormatError, NetworkValidationError, load_network
from .reporting import (
    read_cvar_table,
    read_scenario_stats,
    write_cvar_table,
    write_raw_trials,
    write_scenario_stats,
    write_score_table,
    write_shapley_table,
)
from .risk import HIGHER_IS_BETTER, ParamDistribution, cvar_alpha

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_CHECK_FAILED = 3

# Frozen reference Shapley weights for the bundled weight cases, used by
# `verify` as a fast end-to-end check of the measure/Shapley machinery.
REFERENCE_SHAPLEY = {
    "Case I": (0.35235, 0.07617, 0.04451, 0.20400, 0.32294),
    "Case II": (0.23225, 0.18573, 0.16404, 0.18573, 0.23225),
    "Case III": (0.09441, 0.30385, 0.33202, 0.20849, 0.06121),
    "Case IV": (0.34422, 0.19903, 0.19903, 0.19903, 0.05869),
    "Case V": (0.05869, 0.19903, 0.19903, 0.19903, 0.34422),
}
REFERENCE_SHAPLEY_TOL = 5e-5


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ReportBundle:
    scenario_stats: dict[str, list[ScenarioStats]]
    cvar_table: dict[str, dict[str, float]]
    shapley_table: list[tuple[str, dict[str, float], float]]
    score_table: list[tuple[str, str, float, float]]
    manifest_path: Path


def _stats_path(out_dir: Path, mode: str) -> Path:
    return out_dir / f"scenario_stats_{mode}.csv"


def cmd_simulate(cfg: RunConfig, jobs: int = 1) -> dict[str, list[ScenarioStats]]:
    """Run every (mode, scenario) cell and write per-mode stats CSVs."""
    net = load_network(cfg.network_path)
    all_stats: dict[str, list[ScenarioStats]] = {}
    for mode in cfg.mode_list:
        stats = run_all_scenarios(
            net.with_mode(mode),
            cfg.scenario_set,
            cfg.timeline,
            cfg.n_trials,
            cfg.master_seed,
            jobs=jobs,
            keep_raw=cfg.emit_raw_trials,
        )
        all_stats[mode] = stats
        write_scenario_stats(_stats_path(cfg.output_dir, mode), stats)
        if cfg.emit_raw_trials:
            write_raw_trials(cfg.output_dir / f"raw_trials_{mode}.csv", stats)
        print(f"simulate: mode={mode} -> {_stats_path(cfg.output_dir, mode)}")
    return all_stats


def cvar_from_stats(stats: list[ScenarioStats], alpha: float) -> dict[str, float]:
    """Min-max normalize each parameter across scenarios, then take CVaR.

    With a single scenario the normalization is degenerate; zeros are
    emitted with a warning.
    """
    if len(stats) < 2:
        warnings.warn("risk summary over fewer than 2 scenarios is degenerate; emitting zeros")
    from .risk import normalize_minmax

    out: dict[str, float] = {}
    probs = [s.probability for s in stats]
    for p in PARAMETER_NAMES:
        values = normalize_minmax([getattr(s.mean_params, p) for s in stats])
        dist = ParamDistribution(tuple(zip(values, probs)), HIGHER_IS_BETTER)
        out[p] = cvar_alpha(dist, alpha)
    return out


def cmd_risk(cfg: RunConfig) -> dict[str, dict[str, float]]:
    """Build the per-mode CVaR table from previously written stats files."""
    table: dict[str, dict[str, float]] = {}
    for mode in cfg.mode_list:
        stats_path = _stats_path(cfg.output_dir, mode)
        if not stats_path.exists():
            raise FileNotFoundError(f"missing stats file {stats_path}; run `simulate` first")
        table[mode] = cvar_from_stats(read_scenario_stats(stats_path), cfg.alpha)
    out_path = cfg.output_dir / "cvar_table.csv"
    write_cvar_table(out_path, table)
    print(f"risk: alpha={cfg.alpha} -> {out_path}")
    return table


def cmd_score(cfg: RunConfig) -> tuple[list, list]:
    """Score every (mode, weight case) pair from the CVaR table."""
    cvar_path = cfg.output_dir / "cvar_table.csv"
    if not cvar_path.exists():
        raise FileNotFoundError(f"missing CVaR table {cvar_path}; run `risk` first")
    cvar_table = read_cvar_table(cvar_path)

    shapley_rows = []
    for case, densities in cfg.weight_cases.items():
        m = build_measure(densities)
        shapley_rows.append((case, dict(shapley(m).eta), m.lam))

    score_rows = []
    for mode, cvars in cvar_table.items():
        for case, densities in cfg.weight_cases.items():
            score = resilience_metric(cvars, densities, case_label=f"{mode}/{case}")
            score_rows.append((mode, case, score.lam, score.value))

    shapley_path = cfg.output_dir / "shapley_table.csv"
    score_path = cfg.output_dir / "score_table.csv"
    write_shapley_table(shapley_path, shapley_rows)
    write_score_table(score_path, score_rows)
    print(f"score: {len(cfg.weight_cases)} cases -> {shapley_path}, {score_path}")
    return shapley_rows, score_rows


def cmd_full(cfg: RunConfig, jobs: int = 1) -> ReportBundle:
    """simulate -> risk -> score, plus the run manifest."""
    try:
        stats = cmd_simulate(cfg, jobs=jobs)
    except Exception as exc:
        raise StageError("simulate", exc) from exc
    try:
        cvar_table = cmd_risk(cfg)
    except Exception as exc:
        raise StageError("risk", exc) from exc
    try:
        shapley_rows, score_rows = cmd_score(cfg)
    except Exception as exc:
        raise StageError("score", exc) from exc
    manifest_path = cfg.output_dir / "run_manifest.json"
    write_manifest(cfg, manifest_path, __version__)
    print(f"full: manifest -> {manifest_path}")
    return ReportBundle(stats, cvar_table, shapley_rows, score_rows, manifest_path)


def check_reference_shapley(tol: float = REFERENCE_SHAPLEY_TOL) -> list[str]:
    """Compare bundled-case Shapley weights to frozen references.

    Returns a list of human-readable failures (empty when everything
    matches within ``tol``).
    """
    failures: list[str] = []
    cases = default_weight_cases()
    for case, expected in REFERENCE_SHAPLEY.items():
        if case not in cases:
            failures.append(f"{case}: missing from bundled weight cases")
            continue
        got = shapley(build_measure(cases[case])).values
        for name, g, e in zip(PARAMETER_NAMES, got, expected):
            if abs(g - e) > tol:
                failures.append(f"{case}/{name}: got {g:.6f}, expected {e:.5f} (tol {tol})")
    return failures


def cmd_verify() -> int:
    failures = check_reference_shapley()
    for case in REFERENCE_SHAPLEY:
        bad = [f for f in failures if f.startswith(case)]
        print(f"verify {case}: {'FAIL' if bad else 'ok'}")
    for f in failures:
        print(f"  {f}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridres",
        description="Wind-resilience Monte-Carlo study of a distribution feeder.",
    )
    parser.add_argument("--version", action="version", version=f"gridres {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_jobs: bool = False):
        p.add_argument("--config", required=True, help="run configuration JSON file")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--trials", type=int, default=None, help="override n_trials")
        p.add_argument("--alpha", type=float, default=None, help="override alpha")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--raw", action="store_true", default=None,
                       help="also dump per-trial parameter values")
        if needs_jobs:
            p.add_argument("--jobs", type=int, default=1,
                           help="worker processes for trials (results are identical for any value)")

    add_common(sub.add_parser("simulate", help="run Monte-Carlo trials per mode and scenario"),
               needs_jobs=True)
    add_common(sub.add_parser("risk", help="normalize stats and compute the CVaR table"))
    add_common(sub.add_parser("score", help="Shapley weights and Choquet scores per weight case"))
    add_common(sub.add_parser("full", help="simulate, risk and score in one run"), needs_jobs=True)
    sub.add_parser("verify", help="check bundled-case Shapley weights against references")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify()
    try:
        cfg = load_run_config(
            args.config, seed=args.seed, trials=args.trials, alpha=args.alpha,
            out=args.out, raw=args.raw,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "simulate":
            cmd_simulate(cfg, jobs=args.jobs)
        elif args.command == "risk":
            cmd_risk(cfg)
        elif args.command == "score":
            cmd_score(cfg)
        elif args.command == "full":
            cmd_full(cfg, jobs=args.jobs)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        inner = exc.cause
        if isinstance(inner, (ConfigError, NetworkFormatError, NetworkValidationError)):
            return EXIT_CONFIG
        return EXIT_RUNTIME
    except (NetworkFormatError, NetworkValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
