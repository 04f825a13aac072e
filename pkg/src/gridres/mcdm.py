"""Fuzzy-measure aggregation: lambda measures, Shapley weights, Choquet integral.

Expert densities d_i in [0, 1] (one per parameter) define a normalized
set function through the multiplicative lambda rule

    mu(S) = (prod_{i in S} (1 + lambda * d_i) - 1) / lambda      lambda != 0
    mu(S) = sum_{i in S} d_i                                     lambda == 0

where lambda > -1 is fixed by mu(all parameters) = 1. Shapley weights are
the exact average marginal contributions over all subsets; they sum to 1
and serve as the importance of each parameter. The discrete Choquet
integral aggregates a value per parameter against the measure by walking
the values in ascending order and weighting each increment with the
measure of the set of parameters at or above that rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

LAMBDA_RESIDUAL_ACCEPT = 1e-10
LAMBDA_MAX_ITER = 200
ADDITIVE_SUM_TOL = 1e-12
MEASURE_NORM_TOL = 1e-9

# 2^N subsets are enumerated exactly; keep N small.
MAX_EXACT_PARAMS = 20


class LambdaSolveError(ArithmeticError):
    """The normalizing interaction degree could not be determined."""


@dataclass(frozen=True)
class FuzzyDensities:
    """Ordered per-parameter densities, each in [0, 1]."""

    densities: dict[str, float]

    def __post_init__(self):
        if len(self.densities) < 2:
            raise ValueError("need densities for at least two parameters")
        for name, d in self.densities.items():
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"density for {name!r} must be in [0, 1], got {d}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.densities)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self.densities.values())


@dataclass(frozen=True)
class LambdaMeasure:
    densities: FuzzyDensities
    lam: float

    def __post_init__(self):
        if self.lam <= -1.0:
            raise ValueError(f"interaction degree must be > -1, got {self.lam}")


@dataclass(frozen=True)
class ShapleyWeights:
    eta: dict[str, float]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.eta)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self.eta.values())


@dataclass(frozen=True)
class ResilienceScore:
    value: float
    inputs: dict[str, float]
    weights: ShapleyWeights
    lam: float
    case_label: str = ""


def _normalization_gap(lam: float, densities: Iterable[float]) -> float:
    """g(lambda) = prod(1 + lambda d_i) - (1 + lambda); zero at a valid measure."""
    prod = 1.0
    for d in densities:
        prod *= 1.0 + lam * d
    return prod - (1.0 + lam)


def solve_lambda(d: FuzzyDensities) -> float:
    """Interaction degree that normalizes the measure to mu(Gamma) = 1.

    Returns exactly 0 in the additive case (densities summing to 1);
    otherwise bisects the unique nonzero root, negative when densities
    oversum and positive when they undersum.
    """
    mus = d.values
    if all(m == 0.0 for m in mus):
        raise LambdaSolveError("all densities are zero; no normalizing measure exists")
    total = sum(mus)
    if abs(total - 1.0) <= ADDITIVE_SUM_TOL:
        return 0.0

    # The gap near lambda = 0 is (total - 1) * lambda + O(lambda^2); evaluating
    # it there is pure cancellation noise, so the sign at the near-zero end of
    # the bracket is fixed analytically instead of numerically.
    if total > 1.0:
        lo, hi = -1.0 + 1e-12, -1e-15
        lo_is_positive = True  # gap at the far end, checked below
        if _normalization_gap(lo, mus) <= 0.0:
            # happens only when a density sits at 1, pinning the root at -1
            raise LambdaSolveError(
                f"interaction degree lies outside (-1, 0) for densities {mus}"
            )
    else:
        lo, hi = 1e-15, 1.0
        lo_is_positive = False  # gap just right of 0 is negative
        while _normalization_gap(hi, mus) <= 0.0:
            hi *= 2.0
            if hi > 1e12:
                raise LambdaSolveError(
                    f"no positive interaction degree below 1e12 for densities {mus}"
                )

    # Bisect until the bracket collapses to float resolution; stopping on a
    # loose residual would leave mu(full set) off by residual / lambda.
    lam = 0.5 * (lo + hi)
    for _ in range(LAMBDA_MAX_ITER):
        lam = 0.5 * (lo + hi)
        if lam == lo or lam == hi:
            break
        g = _normalization_gap(lam, mus)
        if g == 0.0:
            return lam
        if (g > 0.0) == lo_is_positive:
            lo = lam
        else:
            hi = lam
    if abs(_normalization_gap(lam, mus)) <= LAMBDA_RESIDUAL_ACCEPT:
        return lam
    raise LambdaSolveError(f"interaction-degree solve did not converge for densities {mus}")


def build_measure(d: FuzzyDensities) -> LambdaMeasure:
    m = LambdaMeasure(d, solve_lambda(d))
    full = subset_measure(m, d.names)
    if abs(full - 1.0) > MEASURE_NORM_TOL:
        raise LambdaSolveError(f"measure of the full set is {full!r}, expected 1")
    return m


def subset_measure(m: LambdaMeasure, subset: Iterable[str]) -> float:
    """Measure of a subset of parameters under the lambda rule."""
    names = set(subset)
    unknown = names - set(m.densities.names)
    if unknown:
        raise KeyError(f"unknown parameter names {sorted(unknown)}")
    selected = [m.densities.densities[n] for n in m.densities.names if n in names]
    if not selected:
        return 0.0
    if m.lam == 0.0:
        return sum(selected)
    prod = 1.0
    for d in selected:
        prod *= 1.0 + m.lam * d
    return (prod - 1.0) / m.lam


def shapley(m: LambdaMeasure) -> ShapleyWeights:
    """Exact Shapley importance of every parameter (2^N enumeration)."""
    names = m.densities.names
    n = len(names)
    if n > MAX_EXACT_PARAMS:
        raise ValueError(f"exact Shapley enumeration is limited to {MAX_EXACT_PARAMS} parameters")
    mus = m.densities.values
    lam = m.lam

    # mu over all bitmasks via one multiplicative sweep.
    prod = [1.0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        i = low.bit_length() - 1
        prod[mask] = prod[mask ^ low] * (1.0 + lam * mus[i])
    if lam == 0.0:
        mu = [0.0] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            mu[mask] = mu[mask ^ low] + mus[low.bit_length() - 1]
    else:
        mu = [(p - 1.0) / lam for p in prod]

    fact = [math.factorial(k) for k in range(n + 1)]
    coeff = [fact[n - s - 1] * fact[s] / fact[n] for s in range(n)]
    size = [bin(mask).count("1") for mask in range(1 << n)]

    eta: dict[str, float] = {}
    for i, name in enumerate(names):
        bit = 1 << i
        acc = 0.0
        for mask in range(1 << n):
            if mask & bit:
                continue
            acc += coeff[size[mask]] * (mu[mask | bit] - mu[mask])
        eta[name] = acc
    return ShapleyWeights(eta)


def choquet(values: Mapping[str, float], m: LambdaMeasure) -> float:
    """Discrete Choquet integral of per-parameter values against ``m``.

    Values are walked in ascending order (name order breaks ties, which
    cannot change the result); each increment above the previous level is
    weighted by the measure of the parameters still at or above it.
    """
    names = m.densities.names
    if set(values) != set(names):
        raise KeyError(
            f"value names {sorted(values)} do not match measure parameters {sorted(names)}"
        )
    ranked = sorted(names, key=lambda nm: (values[nm], nm))
    total = 0.0
    prev = 0.0
    for i, name in enumerate(ranked):
        level = values[name]
        total += (level - prev) * subset_measure(m, ranked[i:])
        prev = level
    return total


def resilience_metric(
    cvars: Mapping[str, float], d: FuzzyDensities, case_label: str = ""
) -> ResilienceScore:
    """Aggregate per-parameter CVaR values into one resilience score.

    The expert densities fix the interaction degree and the Shapley
    importance of each parameter; the Shapley weights then act as the
    densities of the scoring measure. Since they sum to 1 that measure is
    additive, so the score is the Shapley-weighted sum of the CVaRs. The
    interaction degree of the original densities is reported alongside.
    """
    if set(cvars) != set(d.names):
        raise KeyError(
            f"CVaR names {sorted(cvars)} do not match density parameters {sorted(d.names)}"
        )
    m = build_measure(d)
    eta = shapley(m)
    additive = LambdaMeasure(FuzzyDensities(dict(eta.eta)), 0.0)
    score = choquet({k: float(v) for k, v in cvars.items()}, additive)
    return ResilienceScore(
        value=score,
        inputs={k: float(cvars[k]) for k in d.names},
        weights=eta,
        lam=m.lam,
        case_label=case_label,
    )
