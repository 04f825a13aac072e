"""Trial timeline, resilience parameters, restoration heuristic, scenario runs."""

import math

import numpy as np
import pytest

from gridres.engine import (
    DEFAULT_RESISTANCE_CAP,
    TimelineConfig,
    TrialResult,
    availability,
    brittleness,
    resistance,
    resourcefulness_score,
    restore_smart,
    robustness,
    run_all_scenarios,
    run_scenario,
    run_trial,
    trial_rng,
)
from gridres.hazard import WindScenarioSet
from gridres.network import load_network

from conftest import bus, dg, doomed, line, net_of, sturdy, sub

TC = TimelineConfig(
    t1_up=12.0,
    event_duration=6.0,
    assessment_time_base=12.0,
    assessment_time_smart=2.0,
    restoration_duration=24.0,
    horizon=96.0,
)
SCEN = WindScenarioSet.from_pairs([(10.0, 0.5), (40.0, 0.4), (80.0, 0.1)])


def _toy_net(mode="base"):
    """Substation s feeding two CLs; the s-b leg collapses at v >= 30."""
    buses = [bus("s"), bus("a", 50.0, critical=True), bus("b", 50.0, critical=True)]
    lines = [line("sa", "s", "a", frag=sturdy()), line("sb", "s", "b", frag=doomed(30.0))]
    return net_of(buses, lines, [sub("s")], mode=mode)


def _trial(mode="base", theta=0.0, damage=0.0, uptime=None, downtime=None):
    uptime = uptime if uptime is not None else {"c1": TC.horizon}
    downtime = downtime if downtime is not None else {k: 0.0 for k in uptime}
    return TrialResult(
        mode=mode,
        failed_lines=frozenset(),
        damage_pct=damage,
        n_bar=0,
        n_prime=0,
        theta_max=theta,
        closed_ties=frozenset(),
        per_cl_uptime=uptime,
        per_cl_downtime=downtime,
    )


# ---------------------------------------------------------------------------
# Timeline validation
# ---------------------------------------------------------------------------


def test_timeline_rejects_smart_slower_than_base():
    with pytest.raises(ValueError, match="assessment_time_smart"):
        TimelineConfig(12, 6, 2, 12, 24, 96)


def test_timeline_rejects_phases_beyond_horizon():
    with pytest.raises(ValueError, match="horizon"):
        TimelineConfig(12, 6, 12, 2, 24, 40)


def test_timeline_rejects_nonpositive_durations():
    with pytest.raises(ValueError, match="positive"):
        TimelineConfig(0, 6, 12, 2, 24, 96)


def test_restoration_start_per_mode():
    assert TC.restoration_start("base") == 30.0
    assert TC.restoration_start("smart") == 20.0


# ---------------------------------------------------------------------------
# Parameter formulas
# ---------------------------------------------------------------------------


def test_availability_direct_arithmetic():
    t = _trial(
        uptime={"c1": 8.0, "c2": 8.0, "c3": 10.0},
        downtime={"c1": 2.0, "c2": 2.0, "c3": 0.0},
    )
    assert availability(t) == pytest.approx(26.0 / 30.0)


def test_availability_all_online_and_all_offline():
    assert availability(_trial(uptime={"c": 96.0}, downtime={"c": 0.0})) == 1.0
    assert availability(_trial(uptime={"c": 0.0}, downtime={"c": 96.0})) == 0.0


def test_availability_zero_horizon_errors():
    with pytest.raises(ValueError):
        availability(_trial(uptime={"c": 0.0}, downtime={"c": 0.0}))


def test_robustness_fraction():
    assert robustness(_trial(theta=4.0 / 13.0)) == pytest.approx(9.0 / 13.0)
    assert robustness(_trial(theta=0.0)) == 1.0
    assert robustness(_trial(theta=1.0)) == 0.0


def test_robustness_requires_critical_loads():
    with pytest.raises(ValueError):
        robustness(_trial(uptime={}, downtime={}))


def test_brittleness_examples():
    assert brittleness(_trial(theta=0.4, damage=20.0)) == pytest.approx(2.0)
    assert brittleness(_trial(theta=1.0, damage=100.0)) == pytest.approx(1.0)
    assert brittleness(_trial(theta=0.0, damage=15.0)) == 0.0


def test_resistance_direct_arithmetic():
    tc = TimelineConfig(10.0, 5.0, 5.0, 5.0, 5.0, 40.0)  # delta_t1 base = 20 h
    t = _trial(theta=0.5, uptime={"c1": 10.0, "c2": 10.0}, downtime={"c1": 30.0, "c2": 30.0})
    assert resistance(t, 1.0, tc) == pytest.approx(1.0)
    assert resistance(t, 0.5, tc) == pytest.approx(0.5)  # linear in severity


def test_resistance_capped_when_undamaged():
    assert resistance(_trial(theta=0.0), 1.0, TC) == DEFAULT_RESISTANCE_CAP
    assert resistance(_trial(theta=0.0), 1.0, TC, cap=7.0) == 7.0


def test_resourcefulness_score():
    assert resourcefulness_score(5, 3, 2, 1) == pytest.approx(1.0)
    assert resourcefulness_score(0, 3, 2, 4) == 0.0
    with pytest.raises(ValueError):
        resourcefulness_score(1, 0, 0, 5)
    with pytest.raises(ValueError):
        resourcefulness_score(1, 3, 2, 0)


def test_base_mode_counts_single_source():
    net = _toy_net()
    smart = net.with_mode("smart")
    many = net_of(
        list(net.buses),
        list(net.lines),
        [sub("s"), dg("a", 10.0), dg("b", 10.0)],
        mode="base",
    )
    assert many.effective_source_buses() == ("s",)
    assert many.with_mode("smart").effective_source_buses() == ("s", "a", "b")
    assert smart.effective_source_buses() == ("s",)  # no DGs to add


# ---------------------------------------------------------------------------
# run_trial
# ---------------------------------------------------------------------------


def test_trial_no_failures_is_perfect():
    t = run_trial(_toy_net(), 10.0, TC, SCEN, trial_rng(1, 0, 0))
    assert t.failed_lines == frozenset()
    assert t.theta_max == 0.0
    assert t.params.availability == 1.0
    assert t.params.robustness == 1.0
    assert t.params.brittleness == 0.0
    assert t.params.resistance == DEFAULT_RESISTANCE_CAP
    assert t.params.resourcefulness > 0.0


def test_trial_total_collapse():
    net = net_of(
        [bus("s"), bus("a", 10.0, critical=True), bus("b", 10.0, critical=True)],
        [line("sa", "s", "a", frag=doomed(30.0)), line("ab", "a", "b", frag=doomed(30.0))],
        [sub("s")],
    )
    t = run_trial(net, 100.0, TC, WindScenarioSet.from_pairs([(100.0, 1.0)]), trial_rng(4, 0, 0))
    assert t.n_bar == 0 and t.theta_max == 1.0
    assert t.params.availability == pytest.approx(TC.t1_up / TC.horizon)
    assert t.params.robustness == 0.0
    assert t.params.resourcefulness == 0.0


def test_trial_forced_single_line_outage_base_mode():
    # the fragile leg fails at v = 40, isolating one of the two CLs
    t = run_trial(_toy_net(), 40.0, TC, SCEN, trial_rng(2, 1, 0))
    assert t.failed_lines == {"sb"}
    assert t.theta_max == pytest.approx(0.5)
    assert t.params.robustness == pytest.approx(0.5)
    assert t.per_cl_downtime["b"] == pytest.approx(TC.horizon - TC.t1_up)
    assert t.per_cl_uptime["a"] == TC.horizon
    assert t.n_prime == t.n_bar == 1  # base mode: no pickup


def test_trial_per_cl_times_sum_to_horizon():
    net = _toy_net("smart")
    for seed in range(20):
        t = run_trial(net, 40.0, TC, SCEN, trial_rng(seed, 1, 0))
        for cl in ("a", "b"):
            assert t.per_cl_uptime[cl] + t.per_cl_downtime[cl] == pytest.approx(TC.horizon)


def test_trial_robustness_equals_one_minus_theta_exactly(bundled_network_path):
    net = load_network(bundled_network_path)
    for seed in range(10):
        t = run_trial(net, 35.0, TC, SCEN, trial_rng(seed, 0, 0))
        assert t.params.robustness == 1.0 - t.theta_max


def test_trial_params_finite_nonnegative(bundled_network_path):
    net = load_network(bundled_network_path).with_mode("smart")
    for seed in range(15):
        t = run_trial(net, 32.0, TC, SCEN, trial_rng(seed, 2, 0))
        arr = t.params.as_array()
        assert np.all(np.isfinite(arr)) and np.all(arr >= 0.0)
        assert 0.0 <= t.params.availability <= 1.0
        assert 0.0 <= t.params.robustness <= 1.0


# ---------------------------------------------------------------------------
# Smart restoration
# ---------------------------------------------------------------------------


def _restoration_net():
    """Substation island, a feasible DG island, and a dark island behind ties."""
    buses = [
        bus("s"),
        bus("e1", 20.0, critical=True),
        bus("d2", 30.0, critical=True),
        bus("d1", 40.0, critical=True),
    ]
    lines = [
        line("l_se", "s", "e1", frag=sturdy()),
        line("l_sd2", "s", "d2", frag=doomed(30.0)),
        line("l_d2d1", "d2", "d1", frag=doomed(30.0)),
        line("t1", "d1", "d2", tie=True, switchable=True),
        line("t2", "d2", "e1", tie=True, switchable=True),
    ]
    return net_of(buses, lines, [sub("s")], mode="smart")


def test_restoration_multi_pass_tie_closure():
    # after the event: islands {s,e1}, {d2}, {d1}; t1 joins two dark islands
    # and only becomes useful after t2 brings d2 back
    net = _restoration_net()
    t = run_trial(net, 40.0, TC, SCEN, trial_rng(9, 1, 0))
    assert t.failed_lines == {"l_sd2", "l_d2d1"}
    assert t.n_bar == 1
    assert t.closed_ties == {"t1", "t2"}
    assert t.n_prime == 3
    assert t.per_cl_downtime["d1"] == pytest.approx(TC.event_duration + TC.assessment_time_smart)


def test_restoration_respects_capacity_feasibility():
    # DG island carries its own CL; pulling in the big dark CL would
    # overload it, so the tie must stay open
    buses = [
        bus("s"),
        bus("m", 0.0),
        bus("c1", 100.0, critical=True),
        bus("c2", 200.0, critical=True),
    ]
    lines = [
        line("l_sm", "s", "m", frag=doomed(30.0)),
        line("l_mc1", "m", "c1", frag=sturdy()),
        line("l_sc2", "s", "c2", frag=doomed(30.0)),
        line("t1", "c1", "c2", tie=True),
    ]
    net = net_of(buses, lines, [sub("s"), dg("m", 120.0)], mode="smart")
    closed, served = restore_smart(net, frozenset({"l_sm", "l_sc2"}))
    assert closed == frozenset()
    assert served == {"c1"}


def test_restoration_never_drops_previously_served_loads(bundled_network_path):
    net = load_network(bundled_network_path).with_mode("smart")
    for seed in range(40):
        t = run_trial(net, 30.0, TC, SCEN, trial_rng(seed, 1, 0))
        assert t.n_bar <= t.n_prime <= net.n_critical


def test_smart_dominates_base_per_trial(bundled_network_path):
    base = load_network(bundled_network_path)
    smart = base.with_mode("smart")
    for seed in range(40):
        rng_b = trial_rng(seed, 1, 0)
        rng_s = trial_rng(seed, 1, 0)
        tb = run_trial(base, 28.0, TC, SCEN, rng_b)
        ts = run_trial(smart, 28.0, TC, SCEN, rng_s)
        assert tb.failed_lines == ts.failed_lines
        assert tb.n_bar == ts.n_bar and tb.theta_max == ts.theta_max
        assert ts.params.availability >= tb.params.availability
        assert ts.params.brittleness == tb.params.brittleness


# ---------------------------------------------------------------------------
# run_scenario
# ---------------------------------------------------------------------------


def test_scenario_single_trial_equals_that_trial():
    net = _toy_net()
    stats = run_scenario(net, SCEN, 1, TC, 1, master_seed=77)
    t = run_trial(net, SCEN.scenarios[1].speed, TC, SCEN, trial_rng(77, 1, 0))
    assert stats.mean_params == t.params


def test_scenario_zero_failure_regime_exact():
    net = net_of(
        [bus("s"), bus("a", 10.0, critical=True)],
        [line("sa", "s", "a", frag=sturdy())],
        [sub("s")],
    )
    stats = run_scenario(net, SCEN, 0, TC, 25, master_seed=5, keep_raw=True)
    first = stats.raw_trials[0]
    assert all(pv == first for pv in stats.raw_trials)
    assert stats.mean_params == first


def test_scenario_mean_matches_raw_trials(bundled_network_path):
    net = load_network(bundled_network_path)
    stats = run_scenario(net, SCEN, 1, TC, 60, master_seed=3, keep_raw=True)
    raw = np.array([pv.as_array() for pv in stats.raw_trials])
    assert np.allclose(raw.mean(axis=0), stats.mean_params.as_array(), rtol=0, atol=1e-12)


def test_scenario_parallel_runs_bit_identical(bundled_network_path):
    net = load_network(bundled_network_path).with_mode("smart")
    s1 = run_scenario(net, SCEN, 1, TC, 120, master_seed=11, jobs=1, keep_raw=True)
    s4 = run_scenario(net, SCEN, 1, TC, 120, master_seed=11, jobs=4, keep_raw=True)
    assert s1.mean_params == s4.mean_params
    assert s1.raw_trials == s4.raw_trials


def test_scenario_rejects_zero_trials():
    with pytest.raises(ValueError):
        run_scenario(_toy_net(), SCEN, 0, TC, 0, master_seed=1)


def test_mean_availability_and_robustness_nonincreasing_in_speed(bundled_network_path):
    # statistical monotonicity: allow one inversion if it sits within two
    # standard errors of the neighboring mean
    net = load_network(bundled_network_path)
    scen = WindScenarioSet.from_pairs(
        [(15.0, 0.35), (25.0, 0.30), (35.0, 0.20), (45.0, 0.11), (60.0, 0.04)]
    )
    n = 400
    stats = run_all_scenarios(net, scen, TC, n, master_seed=2718, keep_raw=True)
    for pname in ("availability", "robustness"):
        means = [getattr(s.mean_params, pname) for s in stats]
        ses = [
            np.std([getattr(pv, pname) for pv in s.raw_trials], ddof=1) / math.sqrt(n)
            for s in stats
        ]
        inversions = [
            i for i in range(len(means) - 1) if means[i + 1] > means[i]
        ]
        assert len(inversions) <= 1, f"{pname}: means {means}"
        for i in inversions:
            gap = means[i + 1] - means[i]
            assert gap <= 2 * (ses[i] + ses[i + 1]), f"{pname}: inversion too large at {i}"
