"""Lambda measures, Shapley weights, Choquet integral, resilience scoring."""

import itertools
import random


import pytest
import scipy.optimize

from gridres.mcdm import (
    FuzzyDensities,
    LambdaMeasure,
    LambdaSolveError,
    build_measure,
    choquet,
    resilience_metric,
    shapley,
    solve_lambda,
    subset_measure,
)

PARAMS = ("availability", "robustness", "brittleness", "resistance", "resourcefulness")


def dens(values, names=None) -> FuzzyDensities:
    names = names or [f"p{i}" for i in range(len(values))]
    return FuzzyDensities(dict(zip(names, values)))


def brentq_lambda(values):
    """Independent root bracket for the normalization condition."""
    def gap(lam):
        prod = 1.0
        for v in values:
            prod *= 1.0 + lam * v
        return prod - (1.0 + lam)

    total = sum(values)
    if total > 1.0:
        return scipy.optimize.brentq(gap, -1 + 1e-12, -1e-12, xtol=1e-15)
    return scipy.optimize.brentq(gap, 1e-12, 1e6, xtol=1e-15)


# ---------------------------------------------------------------------------
# solve_lambda
# ---------------------------------------------------------------------------


def test_lambda_additive_case_is_exactly_zero():
    assert solve_lambda(dens([0.5, 0.5])) == 0.0
    assert solve_lambda(dens([0.2, 0.3, 0.5])) == 0.0


def test_lambda_oversummed_densities_negative_root():
    values = [0.9, 0.25, 0.15, 0.6, 0.85]
    lam = solve_lambda(dens(values))
    assert -1.0 < lam < 0.0
    assert lam == pytest.approx(brentq_lambda(values), abs=1e-10)


def test_lambda_undersummed_densities_positive_root():
    values = [0.2, 0.3]
    lam = solve_lambda(dens(values))
    assert lam == pytest.approx(25.0 / 3.0, abs=1e-9)
    assert lam == pytest.approx(brentq_lambda(values), abs=1e-9)


def test_lambda_all_zero_densities_rejected():
    with pytest.raises((LambdaSolveError, ValueError)):
        solve_lambda(dens([0.0, 0.0, 0.0]))


def test_lambda_single_positive_density_has_no_root():
    with pytest.raises(LambdaSolveError):
        solve_lambda(dens([0.4, 0.0, 0.0]))


# ---------------------------------------------------------------------------
# subset_measure
# ---------------------------------------------------------------------------


def test_subset_measure_boundary_conditions():
    m = build_measure(dens([0.9, 0.25, 0.15, 0.6, 0.85]))
    assert subset_measure(m, ()) == 0.0
    assert subset_measure(m, m.densities.names) == pytest.approx(1.0, abs=1e-9)


def test_subset_measure_additive_case():
    m = LambdaMeasure(dens([0.2, 0.3], names=["a", "b"]), 0.0)
    assert subset_measure(m, {"a", "b"}) == pytest.approx(0.5)
    assert subset_measure(m, {"a"}) == pytest.approx(0.2)


def test_subset_measure_singletons_equal_densities():
    values = [0.3, 0.7, 0.1, 0.5]
    m = build_measure(dens(values))
    for name, v in zip(m.densities.names, values):
        assert subset_measure(m, {name}) == pytest.approx(v, abs=1e-12)


def test_subset_measure_unknown_name():
    m = build_measure(dens([0.2, 0.3, 0.4]))
    with pytest.raises(KeyError):
        subset_measure(m, {"ghost"})


def test_measure_monotone_on_random_chains():
    rng = random.Random(17)
    for _ in range(300):
        n = rng.randint(2, 6)
        values = [rng.uniform(0.02, 0.98) for _ in range(n)]
        m = build_measure(dens(values))
        names = list(m.densities.names)
        rng.shuffle(names)
        chain_vals = [subset_measure(m, names[:k]) for k in range(n + 1)]
        assert all(b >= a - 1e-12 for a, b in zip(chain_vals, chain_vals[1:]))


# ---------------------------------------------------------------------------
# Shapley
# ---------------------------------------------------------------------------


def test_shapley_equal_densities_split_evenly():
    w = shapley(build_measure(dens([0.4] * 5)))
    assert all(v == pytest.approx(0.2, abs=1e-12) for v in w.values)


def test_shapley_efficiency_and_nonnegativity():
    rng = random.Random(23)
    for _ in range(300):
        n = rng.randint(2, 6)
        w = shapley(build_measure(dens([rng.uniform(0.05, 0.95) for _ in range(n)])))
        assert abs(sum(w.values) - 1.0) <= 1e-9
        assert all(v >= 0.0 for v in w.values)


def test_shapley_symmetry_for_equal_densities():
    w = shapley(build_measure(dens([0.6, 0.5, 0.45, 0.5, 0.6], names=PARAMS)))
    assert w.eta["availability"] == pytest.approx(w.eta["resourcefulness"], abs=1e-12)
    assert w.eta["robustness"] == pytest.approx(w.eta["resistance"], abs=1e-12)


def test_shapley_matches_definition_by_direct_enumeration():
    # independent route: iterate subsets with itertools and raw factorials
    import math

    values = [0.7, 0.15, 0.4]
    m = build_measure(dens(values, names=["x", "y", "z"]))
    got = shapley(m)
    names = ["x", "y", "z"]
    n = len(names)
    for target in names:
        others = [nm for nm in names if nm != target]
        acc = 0.0
        for size in range(n):
            for combo in itertools.combinations(others, size):
                weight = math.factorial(n - size - 1) * math.factorial(size) / math.factorial(n)
                acc += weight * (
                    subset_measure(m, set(combo) | {target}) - subset_measure(m, set(combo))
                )
        assert got.eta[target] == pytest.approx(acc, abs=1e-12)


def test_shapley_too_many_parameters_rejected():
    many = dens([0.5] * 21)
    with pytest.raises(ValueError):
        shapley(LambdaMeasure(many, 0.0))


# ---------------------------------------------------------------------------
# Choquet
# ---------------------------------------------------------------------------


def test_choquet_additive_is_weighted_mean():
    m = LambdaMeasure(dens([0.4, 0.6], names=["a", "b"]), 0.0)
    assert choquet({"a": 0.2, "b": 0.5}, m) == pytest.approx(0.38, abs=1e-15)


def test_choquet_two_term_hand_evaluation():
    m = build_measure(dens([0.3, 0.6], names=["a", "b"]))
    # ascending walk: 0.2 * mu({a,b}) + (0.5 - 0.2) * mu({b}) = 0.2 + 0.3 * 0.6
    assert choquet({"a": 0.2, "b": 0.5}, m) == pytest.approx(0.38, abs=1e-9)


def test_choquet_idempotent_on_constants():
    rng = random.Random(29)
    for _ in range(100):
        m = build_measure(dens([rng.uniform(0.05, 0.95) for _ in range(5)]))
        c = rng.uniform(0, 10)
        f = {nm: c for nm in m.densities.names}
        assert choquet(f, m) == pytest.approx(c, abs=1e-12)


def test_choquet_internality_and_monotonicity():
    rng = random.Random(37)
    for _ in range(200):
        m = build_measure(dens([rng.uniform(0.05, 0.95) for _ in range(4)]))
        f = {nm: rng.uniform(0, 1) for nm in m.densities.names}
        g = {nm: f[nm] + rng.uniform(0, 1) for nm in f}
        cf, cg = choquet(f, m), choquet(g, m)
        assert min(f.values()) - 1e-12 <= cf <= max(f.values()) + 1e-12
        assert cg >= cf - 1e-12


def test_choquet_tie_order_invariance():
    m = build_measure(dens([0.5, 0.2, 0.7], names=["a", "b", "c"]))
    f = {"a": 0.4, "b": 0.4, "c": 0.9}
    # permuting the equal-valued parameters must not change the integral
    g = {"b": 0.4, "a": 0.4, "c": 0.9}
    assert choquet(f, m) == choquet(g, m)


def test_choquet_name_mismatch():
    m = build_measure(dens([0.3, 0.4], names=["a", "b"]))
    with pytest.raises(KeyError):
        choquet({"a": 1.0, "z": 2.0}, m)


# ---------------------------------------------------------------------------
# resilience_metric
# ---------------------------------------------------------------------------


def test_metric_equal_cvars_give_that_value():
    d = dens([0.9, 0.25, 0.15, 0.6, 0.85], names=PARAMS)
    score = resilience_metric({p: 0.42 for p in PARAMS}, d, case_label="flat")
    assert score.value == pytest.approx(0.42, abs=1e-9)
    assert score.case_label == "flat"


def test_metric_equal_densities_give_arithmetic_mean():
    d = dens([0.5] * 5, names=PARAMS)
    cvars = {p: v for p, v in zip(PARAMS, [0.1, 0.2, 0.3, 0.4, 0.5])}
    assert resilience_metric(cvars, d).value == pytest.approx(0.3, abs=1e-9)


def test_metric_is_shapley_weighted_sum():
    d = dens([0.9, 0.6, 0.6, 0.6, 0.2], names=PARAMS)
    cvars = {p: v for p, v in zip(PARAMS, [0.02, 0.001, 0.017, 0.004, 0.0003])}
    score = resilience_metric(cvars, d)
    expected = sum(score.weights.eta[p] * cvars[p] for p in PARAMS)
    assert score.value == pytest.approx(expected, abs=1e-12)
    assert score.lam == pytest.approx(solve_lambda(d))
    assert score.inputs == cvars


def test_metric_name_mismatch():
    d = dens([0.5, 0.5], names=["a", "b"])
    with pytest.raises(KeyError):
        resilience_metric({"a": 1.0, "c": 2.0}, d)
