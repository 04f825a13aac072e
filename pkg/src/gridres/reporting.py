"""CSV emission and ingestion for the pipeline stages.

All files use '.' decimals, a fixed column order, 6 significant digits and
'\n' line endings so reruns with the same seed are byte-identical and
diff-able.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from .engine import PARAMETER_NAMES, ParameterVector, ScenarioStats

STATS_COLUMNS = ("speed_ms", "probability", *PARAMETER_NAMES)
RAW_COLUMNS = ("speed_ms", "trial", *PARAMETER_NAMES)
CVAR_COLUMNS = ("mode", *PARAMETER_NAMES)
SHAPLEY_COLUMNS = ("case", *PARAMETER_NAMES, "lambda")
SCORE_COLUMNS = ("mode", "case", "lambda", "score")


def fmt(x: float) -> str:
    """6 significant digits, plain decimal point."""
    return format(float(x), ".6g")


def _write_rows(path: Path, header: Iterable[str], rows: Iterable[Iterable[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        writer.writerows(rows)


def write_scenario_stats(path: Path, stats: list[ScenarioStats]) -> None:
    rows = [
        [fmt(s.speed), fmt(s.probability)] + [fmt(v) for v in s.mean_params.as_array()]
        for s in stats
    ]
    _write_rows(path, STATS_COLUMNS, rows)


def read_scenario_stats(path: Path) -> list[ScenarioStats]:
    stats = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(STATS_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            mean = ParameterVector(**{p: float(row[p]) for p in PARAMETER_NAMES})
            stats.append(ScenarioStats(float(row["speed_ms"]), float(row["probability"]), mean))
    if not stats:
        raise ValueError(f"{path}: no scenario rows")
    return stats


def write_raw_trials(path: Path, stats: list[ScenarioStats]) -> None:
    rows = []
    for s in stats:
        for t, pv in enumerate(s.raw_trials or []):
            rows.append([fmt(s.speed), str(t)] + [fmt(v) for v in pv.as_array()])
    _write_rows(path, RAW_COLUMNS, rows)


def write_cvar_table(path: Path, table: dict[str, dict[str, float]]) -> None:
    """rows = network mode, columns = CVaR of each parameter."""
    rows = [[mode] + [fmt(vals[p]) for p in PARAMETER_NAMES] for mode, vals in table.items()]
    _write_rows(path, CVAR_COLUMNS, rows)


def read_cvar_table(path: Path) -> dict[str, dict[str, float]]:
    table: dict[str, dict[str, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CVAR_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            table[row["mode"]] = {p: float(row[p]) for p in PARAMETER_NAMES}
    if not table:
        raise ValueError(f"{path}: no mode rows")
    return table


def write_shapley_table(path: Path, rows: list[tuple[str, dict[str, float], float]]) -> None:
    """One row per weight case: Shapley weight per parameter plus lambda."""
    out = [
        [case] + [fmt(eta[p]) for p in PARAMETER_NAMES] + [fmt(lam)] for case, eta, lam in rows
    ]
    _write_rows(path, SHAPLEY_COLUMNS, out)


def write_score_table(path: Path, rows: list[tuple[str, str, float, float]]) -> None:
    """One row per (mode, case): interaction degree and Choquet score."""
    out = [[mode, case, fmt(lam), fmt(score)] for mode, case, lam, score in rows]
    _write_rows(path, SCORE_COLUMNS, out)
