"""Wind hazard model: scenario distributions, line fragility, failure sampling.

A wind event is spatially uniform: every line in the network sees the same
speed in a given trial. Randomness enters only through per-line fragility
draws, so each trial needs exactly one seeded generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # avoid an import cycle; network imports FragilityCurve
    from .network import Network

# Lower clamp for event severity, keeps resistance finite for v = 0.
SEVERITY_FLOOR = 1e-6

PROBABILITY_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FragilityCurve:
    """Failure probability of one line as a function of wind speed (m/s).

    Below ``v_cri`` the line fails at its normal-weather rate ``p_normal``;
    at or above ``v_col`` failure is certain; in between the probability
    ramps up as a power law with ``shape_exponent`` (1 = linear bridge).
    """

    p_normal: float
    v_cri: float
    v_col: float
    shape_exponent: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p_normal <= 1.0:
            raise ValueError(f"p_normal must be in [0, 1], got {self.p_normal}")
        if not 0.0 < self.v_cri < self.v_col:
            raise ValueError(
                "fragility thresholds must satisfy 0 < v_cri < v_col, got "
                f"v_cri={self.v_cri}, v_col={self.v_col}"
            )
        if self.shape_exponent <= 0.0:
            raise ValueError(f"shape_exponent must be > 0, got {self.shape_exponent}")


@dataclass(frozen=True)
class WindScenario:
    """One discretized wind intensity: speed in m/s and its probability."""

    speed: float
    probability: float

    def __post_init__(self):
        if self.speed < 0.0:
            raise ValueError(f"wind speed must be >= 0, got {self.speed}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"scenario probability must be in [0, 1], got {self.probability}")


@dataclass(frozen=True)
class WindScenarioSet:
    """Discretized wind-intensity distribution, ordered by ascending speed."""

    scenarios: tuple[WindScenario, ...]

    def __post_init__(self):
        if not self.scenarios:
            raise ValueError("scenario set must contain at least one scenario")
        speeds = [s.speed for s in self.scenarios]
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise ValueError(f"scenario speeds must be strictly increasing, got {speeds}")
        total = sum(s.probability for s in self.scenarios)
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"scenario probabilities must sum to 1 (got {total!r})")

    @classmethod
    def from_pairs(cls, pairs) -> "WindScenarioSet":
        """Build from (speed_ms, probability) pairs, in any order."""
        scen = sorted((WindScenario(float(v), float(p)) for v, p in pairs), key=lambda s: s.speed)
        return cls(tuple(scen))

    @property
    def v_max(self) -> float:
        return self.scenarios[-1].speed

    @property
    def speeds(self) -> tuple[float, ...]:
        return tuple(s.speed for s in self.scenarios)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(s.probability for s in self.scenarios)


def failure_probability(curve: FragilityCurve, v: float) -> float:
    """Evaluate a fragility curve at wind speed ``v`` (m/s).

    Nondecreasing in ``v`` and continuous at both thresholds.
    """
    if v < 0.0:
        raise ValueError(f"wind speed must be >= 0, got {v}")
    if v < curve.v_cri:
        return curve.p_normal
    if v >= curve.v_col:
        return 1.0
    frac = ((v - curve.v_cri) / (curve.v_col - curve.v_cri)) ** curve.shape_exponent
    return curve.p_normal + frac * (1.0 - curve.p_normal)


def line_failure_probabilities(net: "Network", v: float) -> np.ndarray:
    """Failure probability of every line of ``net`` at speed ``v``, in line order."""
    return np.array([failure_probability(ln.fragility, v) for ln in net.lines], dtype=float)


def sample_line_failures(net: "Network", v: float, rng: np.random.Generator) -> frozenset[str]:
    """Draw one independent failure outcome per line.

    Deterministic for a given generator state; tie switches are exposed to
    wind like any other line.
    """
    probs = line_failure_probabilities(net, v)
    draws = rng.random(len(probs))
    return frozenset(ln.id for ln, d, p in zip(net.lines, draws, probs) if d < p)


def event_severity(v: float, scenario_set: WindScenarioSet) -> float:
    """Severity of a wind event, normalized by the largest speed in the set.

    Returns v / v_max clamped to (SEVERITY_FLOOR, 1.0]. Used as the event
    weighting in the resistance parameter.
    """
    if v < 0.0:
        raise ValueError(f"wind speed must be >= 0, got {v}")
    v_max = scenario_set.v_max
    if v_max <= 0.0:
        raise ValueError("scenario set has no positive speed to normalize against")
    return min(1.0, max(SEVERITY_FLOOR, v / v_max))
