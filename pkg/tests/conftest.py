"""Shared builders for compact test networks."""

from __future__ import annotations

import pytest

from gridres.config import bundled_data_path, demo_config_path
from gridres.hazard import FragilityCurve
from gridres.network import Bus, Line, Network, Source, validate_network


def curve(p_normal=0.0, v_cri=20.0, v_col=60.0, shape=1.0) -> FragilityCurve:
    return FragilityCurve(p_normal=p_normal, v_cri=v_cri, v_col=v_col, shape_exponent=shape)


def sturdy() -> FragilityCurve:
    """Never fails at any speed used in tests."""
    return curve(p_normal=0.0, v_cri=1e6, v_col=2e6)


def doomed(v_col=30.0) -> FragilityCurve:
    """Certain failure at or above a modest speed."""
    return curve(p_normal=0.0, v_cri=v_col / 2, v_col=v_col)


def bus(bid, load=0.0, critical=False, weight=1.0) -> Bus:
    return Bus(id=bid, load_kw=load, is_critical=critical, weight=weight)


def line(lid, a, b, frag=None, tie=False, switchable=False) -> Line:
    return Line(id=lid, from_bus=a, to_bus=b, fragility=frag or sturdy(),
                is_tie=tie, is_switchable=switchable)


def sub(bid, cap=1e6) -> Source:
    return Source(bus=bid, kind="substation", capacity_kw=cap, smart_only=False)


def dg(bid, cap) -> Source:
    return Source(bus=bid, kind="dg", capacity_kw=cap, smart_only=True)


def net_of(buses, lines, sources, mode="base", check=True) -> Network:
    net = Network(tuple(buses), tuple(lines), tuple(sources), mode)
    if check:
        validate_network(net)
    return net


@pytest.fixture(scope="session")
def bundled_network_path():
    return bundled_data_path("ieee123-like.json")


@pytest.fixture(scope="session")
def bundled_config_path():
    return demo_config_path()
