"""Monte-Carlo engine: phased outage/restoration trials and resilience parameters.

Trial timeline (hours, all measured from t = 0):

    phase 1  [0, t1_up)                        every critical load online
    phase 2  [t1_up, t1_up + event_duration)   wind event, sampled lines fail
    phase 3  damage assessment                 duration depends on mode
    phase 4  restoration                       smart mode only: DGs activate
                                               and tie switches close
    ...      the study window ends at `horizon`; full repair of failed
             lines happens beyond it and is out of scope

Failures take effect at the end of phase 1. Restoration (smart mode) takes
effect at the start of phase 4, i.e. delta_t1 = t1_up + event_duration +
assessment_time hours into the trial. Base mode performs no pickup inside
the horizon. A critical load is therefore in exactly one of three states:
never interrupted (uptime = horizon), restored in phase 4 (downtime =
event_duration + assessment_time), or never restored (downtime =
horizon - t1_up).

Five parameters are computed per trial:

    availability     total CL uptime over total CL time (in [0, 1])
    robustness       fraction of CLs still online right after the event
    brittleness      100 * theta_max / damage_pct (disruption per damage)
    resistance       severity-weighted pre-event uptime per unit of
                     outage incidence and restoration delay
    resourcefulness  surviving source-to-CL simple paths, normalized by
                     (tie switches + sources) * CLs
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hazard import WindScenarioSet, event_severity, sample_line_failures
from .network import (
    DEFAULT_PATH_CAP,
    Network,
    count_simple_paths,
    energized_critical_loads,
    islands,
)

PARAMETER_NAMES = ("availability", "robustness", "brittleness", "resistance", "resourcefulness")

# Resistance is capped here when a trial ends with zero outage incidence
# (an undamaged system is maximally resistant but the ratio is undefined).
DEFAULT_RESISTANCE_CAP = 1e3


@dataclass(frozen=True)
class TimelineConfig:
    """Phase durations of the assessment window, in hours."""

    t1_up: float
    event_duration: float
    assessment_time_base: float
    assessment_time_smart: float
    restoration_duration: float
    horizon: float

    def __post_init__(self):
        for name in (
            "t1_up",
            "event_duration",
            "assessment_time_base",
            "assessment_time_smart",
            "restoration_duration",
            "horizon",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"timeline field {name} must be positive, got {getattr(self, name)}")
        if self.assessment_time_smart > self.assessment_time_base:
            raise ValueError(
                "assessment_time_smart must not exceed assessment_time_base "
                f"({self.assessment_time_smart} > {self.assessment_time_base})"
            )
        used = self.t1_up + self.event_duration + self.assessment_time_base + self.restoration_duration
        if used > self.horizon:
            raise ValueError(
                f"phases 1-4 need {used} h which exceeds the {self.horizon} h horizon"
            )

    def assessment_time(self, mode: str) -> float:
        return self.assessment_time_smart if mode == "smart" else self.assessment_time_base

    def restoration_start(self, mode: str) -> float:
        """delta_t1: hours from t = 0 until restoration can begin."""
        return self.t1_up + self.event_duration + self.assessment_time(mode)


@dataclass(frozen=True)
class ParameterVector:
    availability: float
    robustness: float
    brittleness: float
    resistance: float
    resourcefulness: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in PARAMETER_NAMES], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "ParameterVector":
        return cls(*(float(x) for x in arr))


@dataclass
class TrialResult:
    """Outcome of one Monte-Carlo trial."""

    mode: str
    failed_lines: frozenset[str]
    damage_pct: float
    n_bar: int  # CLs online right after the event
    n_prime: int  # CLs online after phase-4 restoration
    theta_max: float
    closed_ties: frozenset[str]
    per_cl_uptime: dict[str, float]
    per_cl_downtime: dict[str, float]
    params: ParameterVector | None = None


@dataclass
class ScenarioStats:
    """Per-intensity aggregate over trials."""

    speed: float
    probability: float
    mean_params: ParameterVector
    raw_trials: list[ParameterVector] | None = None


# ---------------------------------------------------------------------------
# Restoration heuristic (smart mode, phase 4)
# ---------------------------------------------------------------------------


def restore_smart(
    net: Network, failed: frozenset[str]
) -> tuple[frozenset[str], frozenset[str]]:
    """Greedy tie-switch closure with all sources active.

    Repeatedly closes the lowest-id healthy tie switch that joins a
    de-energized island to an energized one, provided the merged island
    stays capacity-feasible, until no closure qualifies. The feasibility
    guard guarantees restoration never drops a load that was already
    served. Returns (closed tie ids, energized critical loads).
    """
    active = set(s.bus for s in net.sources)
    candidates = sorted(t for t in net.tie_line_ids if t not in failed)
    closed: set[str] = set()

    while True:
        comps = islands(net, failed, closed)
        comp_of: dict[str, int] = {}
        for i, comp in enumerate(comps):
            for b in comp:
                comp_of[b] = i
        capacity = [0.0] * len(comps)
        demand = [0.0] * len(comps)
        has_source = [False] * len(comps)
        for i, comp in enumerate(comps):
            for b in comp:
                if b in active:
                    capacity[i] += net.source_by_bus[b].capacity_kw
                    has_source[i] = True
                bus = net.bus_by_id[b]
                if bus.is_critical:
                    demand[i] += bus.load_kw
        energized = [has_source[i] and demand[i] <= capacity[i] for i in range(len(comps))]

        chosen = None
        for tid in candidates:
            if tid in closed:
                continue
            ln = net.line_by_id[tid]
            a, b = comp_of[ln.from_bus], comp_of[ln.to_bus]
            if a == b or energized[a] == energized[b]:
                continue
            if demand[a] + demand[b] <= capacity[a] + capacity[b]:
                chosen = tid
                break
        if chosen is None:
            break
        closed.add(chosen)

    served = energized_critical_loads(net, failed, closed, active)
    return frozenset(closed), served


# ---------------------------------------------------------------------------
# Per-trial parameters
# ---------------------------------------------------------------------------


def availability(trial: TrialResult) -> float:
    """Fraction of critical-load time spent online across the horizon."""
    up = sum(trial.per_cl_uptime.values())
    total = up + sum(trial.per_cl_downtime.values())
    if total <= 0.0:
        raise ValueError("cannot compute availability over a zero-length horizon")
    return up / total


def robustness(trial: TrialResult) -> float:
    """Fraction of critical loads that rode through the event: 1 - theta_max."""
    if not trial.per_cl_uptime:
        raise ValueError("robustness undefined for a network with zero critical loads")
    return 1.0 - trial.theta_max


def brittleness(trial: TrialResult) -> float:
    """Outage incidence per percent of damaged lines; 0 for an undisturbed trial."""
    if trial.theta_max == 0.0 or trial.damage_pct == 0.0:
        return 0.0
    return 100.0 * trial.theta_max / trial.damage_pct


def resistance(
    trial: TrialResult,
    severity: float,
    tc: TimelineConfig,
    cap: float = DEFAULT_RESISTANCE_CAP,
) -> float:
    """Severity-weighted pre-event uptime per unit incidence and delay.

    All CLs are online for the whole of phase 1, so the per-CL pre-event
    uptime is t1_up. Returns ``cap`` when the trial saw no outage at all.
    """
    if trial.theta_max == 0.0:
        return cap
    n_c = len(trial.per_cl_uptime)
    delta_t1 = tc.restoration_start(trial.mode)
    phase1_total = n_c * tc.t1_up
    return severity * phase1_total / (trial.theta_max * n_c * delta_t1)


def resourcefulness_score(n_paths: int, n_switches: int, n_sources: int, n_critical: int) -> float:
    """Path count normalized by (tie switches + sources) * critical loads."""
    denom = (n_switches + n_sources) * n_critical
    if denom <= 0:
        raise ValueError(
            f"resourcefulness denominator is zero (switches={n_switches}, "
            f"sources={n_sources}, critical={n_critical})"
        )
    return n_paths / denom


def resourcefulness(net: Network, trial: TrialResult, cap: int = DEFAULT_PATH_CAP) -> float:
    """Surviving source-to-CL path density on the post-failure graph.

    Sources follow the network mode (base mode counts the substation only);
    healthy tie lines are traversable since they could be closed.
    """
    sources = net.effective_source_buses()
    result = count_simple_paths(net, trial.failed_lines, sources, net.critical_bus_ids, cap)
    return resourcefulness_score(result.count, net.n_tie_switches, len(sources), net.n_critical)


# ---------------------------------------------------------------------------
# Trials and scenarios
# ---------------------------------------------------------------------------


def run_trial(
    net: Network,
    v: float,
    tc: TimelineConfig,
    scenario_set: WindScenarioSet,
    rng: np.random.Generator,
    path_cap: int = DEFAULT_PATH_CAP,
    resistance_cap: float = DEFAULT_RESISTANCE_CAP,
) -> TrialResult:
    """Simulate one wind event at speed ``v`` and score the five parameters."""
    failed = sample_line_failures(net, v, rng)
    damage_pct = 100.0 * len(failed) / len(net.lines) if net.lines else 0.0

    substation_bus = net.substation.bus
    # Phases 2-3: only the substation holds up islands; DGs are restoration
    # assets and do not carry load before phase 4 even in smart mode.
    online_after_event = energized_critical_loads(net, failed, (), (substation_bus,))
    n_c = net.n_critical
    if n_c == 0:
        raise ValueError("cannot run a trial on a network with zero critical loads")
    n_bar = len(online_after_event)
    theta_max = (n_c - n_bar) / n_c

    if net.mode == "smart":
        closed_ties, online_after_restoration = restore_smart(net, failed)
    else:
        closed_ties = frozenset()
        online_after_restoration = online_after_event
    n_prime = len(online_after_restoration)

    assess = tc.assessment_time(net.mode)
    uptime: dict[str, float] = {}
    downtime: dict[str, float] = {}
    for cl in net.critical_bus_ids:
        if cl in online_after_event:
            down = 0.0
        elif cl in online_after_restoration:
            down = tc.event_duration + assess
        else:
            down = tc.horizon - tc.t1_up
        uptime[cl] = tc.horizon - down
        downtime[cl] = down

    trial = TrialResult(
        mode=net.mode,
        failed_lines=failed,
        damage_pct=damage_pct,
        n_bar=n_bar,
        n_prime=n_prime,
        theta_max=theta_max,
        closed_ties=closed_ties,
        per_cl_uptime=uptime,
        per_cl_downtime=downtime,
    )
    severity = event_severity(v, scenario_set)
    trial.params = ParameterVector(
        availability=availability(trial),
        robustness=robustness(trial),
        brittleness=brittleness(trial),
        resistance=resistance(trial, severity, tc, resistance_cap),
        resourcefulness=resourcefulness(net, trial, path_cap),
    )
    return trial


def trial_rng(master_seed: int, scenario_index: int, trial_index: int) -> np.random.Generator:
    """Independent, order-free generator for one (scenario, trial) cell."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(scenario_index, trial_index))
    return np.random.default_rng(seq)


def _trial_block(args) -> tuple[int, np.ndarray]:
    net, tc, scenario_set, scenario_index, master_seed, start, stop, path_cap = args
    v = scenario_set.scenarios[scenario_index].speed
    out = np.empty((stop - start, len(PARAMETER_NAMES)), dtype=float)
    for offset, t in enumerate(range(start, stop)):
        rng = trial_rng(master_seed, scenario_index, t)
        out[offset] = run_trial(net, v, tc, scenario_set, rng, path_cap=path_cap).params.as_array()
    return start, out


def run_scenario(
    net: Network,
    scenario_set: WindScenarioSet,
    scenario_index: int,
    tc: TimelineConfig,
    n_trials: int,
    master_seed: int,
    jobs: int = 1,
    keep_raw: bool = False,
    path_cap: int = DEFAULT_PATH_CAP,
) -> ScenarioStats:
    """Average the parameter vector over ``n_trials`` independent trials.

    Each trial draws its generator from (master_seed, scenario_index,
    trial_index), and trial results are reduced in trial order, so the
    output is bit-identical no matter how many workers execute it.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    scenario = scenario_set.scenarios[scenario_index]
    values = np.empty((n_trials, len(PARAMETER_NAMES)), dtype=float)

    if jobs <= 1:
        _, block = _trial_block(
            (net, tc, scenario_set, scenario_index, master_seed, 0, n_trials, path_cap)
        )
        values[:] = block
    else:
        chunk = max(1, math.ceil(n_trials / (jobs * 4)))
        tasks = [
            (net, tc, scenario_set, scenario_index, master_seed, s, min(s + chunk, n_trials), path_cap)
            for s in range(0, n_trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for start, block in pool.map(_trial_block, tasks):
                values[start : start + len(block)] = block

    mean = ParameterVector.from_array(values.mean(axis=0))
    raw = [ParameterVector.from_array(row) for row in values] if keep_raw else None
    return ScenarioStats(scenario.speed, scenario.probability, mean, raw)


def run_all_scenarios(
    net: Network,
    scenario_set: WindScenarioSet,
    tc: TimelineConfig,
    n_trials: int,
    master_seed: int,
    jobs: int = 1,
    keep_raw: bool = False,
) -> list[ScenarioStats]:
    return [
        run_scenario(net, scenario_set, i, tc, n_trials, master_seed, jobs=jobs, keep_raw=keep_raw)
        for i in range(len(scenario_set.scenarios))
    ]
