"""Tail-risk summaries of discrete parameter distributions.

Each resilience parameter, averaged per wind intensity, forms a discrete
distribution over the intensity probabilities. VaR and CVaR summarize its
worst tail. "Worst" depends on orientation: for a higher-is-better
parameter the damaging outcomes are the low values, so its severity order
runs from the lowest value upward; a lower-is-better parameter mirrors
that. CVaR uses fractional weight on the boundary atom so the tail mass is
exactly 1 - alpha, which keeps the summary continuous in the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HIGHER_IS_BETTER = "higher_is_better"
LOWER_IS_BETTER = "lower_is_better"

PROBABILITY_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ParamDistribution:
    """Value/probability atoms of one parameter plus its tail orientation."""

    points: tuple[tuple[float, float], ...]
    orientation: str = HIGHER_IS_BETTER

    def __post_init__(self):
        if not self.points:
            raise ValueError("distribution needs at least one atom")
        if self.orientation not in (HIGHER_IS_BETTER, LOWER_IS_BETTER):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        for _, p in self.points:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"atom probability {p} outside [0, 1]")
        total = sum(p for _, p in self.points)
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"atom probabilities must sum to 1 (got {total!r})")

    def severity_ordered(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, probabilities) sorted worst outcome first."""
        reverse = self.orientation == LOWER_IS_BETTER
        pts = sorted(self.points, key=lambda vp: vp[0], reverse=reverse)
        vals = np.array([v for v, _ in pts], dtype=float)
        probs = np.array([p for _, p in pts], dtype=float)
        return vals, probs


@dataclass(frozen=True)
class RiskSummary:
    alpha: float
    var: float
    cvar: float


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")


def normalize_minmax(values) -> list[float]:
    """Map values onto [0, 1] via (x - min) / (max - min).

    A constant input maps to all zeros: it carries no discriminating
    information, and zeros avoid the 0/0.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("cannot normalize an empty value list")
    lo, hi = min(vals), max(vals)
    if hi == lo:
        return [0.0] * len(vals)
    span = hi - lo
    return [(v - lo) / span for v in vals]


def var_alpha(dist: ParamDistribution, alpha: float) -> float:
    """Value-at-risk: first atom, walking from the worst outcome, at which
    the accumulated probability reaches ``alpha``."""
    _check_alpha(alpha)
    vals, probs = dist.severity_ordered()
    cum = 0.0
    for v, p in zip(vals, probs):
        cum += p
        if cum >= alpha:
            return float(v)
    return float(vals[-1])  # round-off fallback; probabilities sum to 1


def cvar_alpha(dist: ParamDistribution, alpha: float) -> float:
    """Conditional value-at-risk: mean over the worst (1 - alpha) tail.

    The boundary atom is weighted fractionally so the tail holds exactly
    1 - alpha of mass.
    """
    _check_alpha(alpha)
    vals, probs = dist.severity_ordered()
    tail = 1.0 - alpha
    cum = np.cumsum(probs)
    before = cum - probs
    weights = np.clip(tail - before, 0.0, probs)
    return float(np.dot(weights, vals) / tail)


def summarize(dist: ParamDistribution, alpha: float) -> RiskSummary:
    return RiskSummary(alpha=alpha, var=var_alpha(dist, alpha), cvar=cvar_alpha(dist, alpha))
