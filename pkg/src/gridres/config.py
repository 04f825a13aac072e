"""Run configuration: one JSON document drives the whole pipeline.

Field names carry explicit units (speed_ms, *_kw, *_hours) and the
resolved configuration is echoed into the run manifest, so a manifest can
be fed back as a config to reproduce a run exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .engine import TimelineConfig
from .hazard import WindScenarioSet
from .mcdm import FuzzyDensities

DEFAULT_N_TRIALS = 1000
DEFAULT_ALPHA = 0.95
DEFAULT_MODES = ("base", "smart")

_TOP_FIELDS = {
    "network_path",
    "mode_list",
    "scenario_set",
    "n_trials",
    "master_seed",
    "alpha",
    "timeline",
    "weight_cases",
    "output_dir",
    "emit_raw_trials",
    "generated_by",  # present when the config is a re-used run manifest
}
_TIMELINE_KEYS = {
    "t1_up_hours": "t1_up",
    "event_duration_hours": "event_duration",
    "assessment_time_base_hours": "assessment_time_base",
    "assessment_time_smart_hours": "assessment_time_smart",
    "restoration_duration_hours": "restoration_duration",
    "horizon_hours": "horizon",
}


class ConfigError(ValueError):
    """Configuration file missing, malformed, or inconsistent."""


@dataclass
class RunConfig:
    network_path: Path
    mode_list: tuple[str, ...]
    scenario_set: WindScenarioSet
    n_trials: int
    master_seed: int
    alpha: float
    timeline: TimelineConfig
    weight_cases: dict[str, FuzzyDensities]
    output_dir: Path
    emit_raw_trials: bool


def bundled_data_path(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(resources.files("gridres").joinpath("data", name))


def default_weight_cases() -> dict[str, FuzzyDensities]:
    raw = json.loads(bundled_data_path("weight_cases.json").read_text())
    return {case: FuzzyDensities({k: float(v) for k, v in dens.items()}) for case, dens in raw.items()}


def demo_config_path() -> Path:
    return bundled_data_path("demo_config.json")


def load_run_config(
    path: str | Path,
    seed: int | None = None,
    trials: int | None = None,
    alpha: float | None = None,
    out: str | Path | None = None,
    raw: bool | None = None,
) -> RunConfig:
    """Load a config file and apply command-line overrides.

    Relative network paths resolve against the config file's directory.
    Every reported problem names the file and the offending field.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    for key in doc:
        if key not in _TOP_FIELDS:
            warnings.warn(f"ignoring unknown field {key!r} in config {path.name}")

    def fail(field: str, why: str) -> ConfigError:
        return ConfigError(f"{path}: field {field!r} {why}")

    if "network_path" not in doc:
        raise fail("network_path", "is required")
    network_path = Path(doc["network_path"])
    if not network_path.is_absolute():
        network_path = (path.parent / network_path).resolve()

    mode_list = tuple(doc.get("mode_list", DEFAULT_MODES))
    if not mode_list or any(m not in DEFAULT_MODES for m in mode_list):
        raise fail("mode_list", f"must be a nonempty subset of {list(DEFAULT_MODES)}, got {list(mode_list)}")

    scen_raw = doc.get("scenario_set")
    if not scen_raw:
        raise fail("scenario_set", "is required and must be nonempty")
    try:
        scenario_set = WindScenarioSet.from_pairs(
            (entry["speed_ms"], entry["probability"]) for entry in scen_raw
        )
    except (KeyError, TypeError) as exc:
        raise fail("scenario_set", f"entries need speed_ms and probability ({exc})") from exc
    except ValueError as exc:
        raise fail("scenario_set", str(exc)) from exc

    n_trials = int(doc.get("n_trials", DEFAULT_N_TRIALS)) if trials is None else int(trials)
    if n_trials < 1:
        raise fail("n_trials", f"must be >= 1, got {n_trials}")

    master_seed = int(doc.get("master_seed", 0)) if seed is None else int(seed)
    if not 0 <= master_seed < 2**64:
        raise fail("master_seed", f"must fit in 64 bits, got {master_seed}")

    alpha_val = float(doc.get("alpha", DEFAULT_ALPHA)) if alpha is None else float(alpha)
    if not 0.0 < alpha_val < 1.0:
        raise fail("alpha", f"must be in (0, 1), got {alpha_val}")

    tl_raw = doc.get("timeline")
    if not isinstance(tl_raw, dict):
        raise fail("timeline", "is required and must be an object")
    missing = set(_TIMELINE_KEYS) - set(tl_raw)
    if missing:
        raise fail("timeline", f"missing keys {sorted(missing)}")
    for key in tl_raw:
        if key not in _TIMELINE_KEYS:
            warnings.warn(f"ignoring unknown field timeline.{key} in config {path.name}")
    try:
        timeline = TimelineConfig(**{attr: float(tl_raw[key]) for key, attr in _TIMELINE_KEYS.items()})
    except ValueError as exc:
        raise fail("timeline", str(exc)) from exc

    if "weight_cases" in doc:
        raw_cases = doc["weight_cases"]
        if isinstance(raw_cases, str):
            # reference to a separate weight-case file, relative to the config
            case_path = Path(raw_cases)
            if not case_path.is_absolute():
                case_path = (path.parent / case_path).resolve()
            try:
                raw_cases = json.loads(case_path.read_text())
            except FileNotFoundError as exc:
                raise fail("weight_cases", f"file not found: {case_path}") from exc
            except json.JSONDecodeError as exc:
                raise fail("weight_cases", f"cannot parse {case_path}: {exc}") from exc
        try:
            weight_cases = {
                case: FuzzyDensities({k: float(v) for k, v in dens.items()})
                for case, dens in raw_cases.items()
            }
        except (AttributeError, TypeError, ValueError) as exc:
            raise fail("weight_cases", str(exc)) from exc
        if not weight_cases:
            raise fail("weight_cases", "must name at least one case")
    else:
        weight_cases = default_weight_cases()

    output_dir = Path(out) if out is not None else Path(doc.get("output_dir", "out"))
    emit_raw = bool(doc.get("emit_raw_trials", False)) if raw is None else bool(raw)

    return RunConfig(
        network_path=network_path,
        mode_list=mode_list,
        scenario_set=scenario_set,
        n_trials=n_trials,
        master_seed=master_seed,
        alpha=alpha_val,
        timeline=timeline,
        weight_cases=weight_cases,
        output_dir=output_dir,
        emit_raw_trials=emit_raw,
    )


def manifest_document(cfg: RunConfig, version: str) -> dict:
    """Resolved-config echo, reusable as a config file.

    The output directory is deliberately omitted: it is where the manifest
    lives, and leaving it out keeps bundles byte-identical when the same
    run is repeated into different directories.
    """
    return {
        "generated_by": f"gridres {version}",
        "network_path": str(cfg.network_path),
        "mode_list": list(cfg.mode_list),
        "scenario_set": [
            {"speed_ms": s.speed, "probability": s.probability} for s in cfg.scenario_set.scenarios
        ],
        "n_trials": cfg.n_trials,
        "master_seed": cfg.master_seed,
        "alpha": cfg.alpha,
        "timeline": {key: getattr(cfg.timeline, attr) for key, attr in _TIMELINE_KEYS.items()},
        "weight_cases": {case: dict(d.densities) for case, d in cfg.weight_cases.items()},
        "emit_raw_trials": cfg.emit_raw_trials,
    }


def write_manifest(cfg: RunConfig, out_path: Path, version: str) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(manifest_document(cfg, version), indent=2) + "\n")
