"""Distribution-feeder graph model and topology queries.

The network is an undirected graph of buses joined by lines. Tie switches
are normally-open lines: they never carry power unless explicitly closed,
but they do count as traversable for path-availability queries because an
operator could close them. Sources (one substation plus optional DGs) sit
on buses and energize whatever island they end up in, subject to an
all-or-nothing capacity check against the island's critical demand.

All types are immutable; every query is a pure function of its arguments,
so concurrent Monte-Carlo trials can share one Network snapshot.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple

from .hazard import FragilityCurve

MODES = ("base", "smart")

# Default ceiling for simple-path enumeration (counting is #P-hard in
# general; results saturate instead of running unbounded).
DEFAULT_PATH_CAP = 1_000_000


class NetworkFormatError(ValueError):
    """Network file is not parseable (bad JSON, wrong container types)."""


class NetworkValidationError(ValueError):
    """Network contents violate a structural invariant."""


@dataclass(frozen=True)
class Bus:
    id: str
    load_kw: float = 0.0
    is_critical: bool = False
    weight: float = 1.0


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    fragility: FragilityCurve
    is_tie: bool = False
    is_switchable: bool = False


@dataclass(frozen=True)
class Source:
    bus: str
    kind: str  # "substation" | "dg"
    capacity_kw: float
    smart_only: bool = True


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    sources: tuple[Source, ...]
    mode: str = "base"

    # -- derived lookups (cached; the dataclass stays hashable by identity of
    #    its fields, caches live in __dict__ and never change the snapshot) --

    @cached_property
    def bus_by_id(self) -> dict[str, Bus]:
        return {b.id: b for b in self.buses}

    @cached_property
    def line_by_id(self) -> dict[str, Line]:
        return {ln.id: ln for ln in self.lines}

    @cached_property
    def source_by_bus(self) -> dict[str, Source]:
        return {s.bus: s for s in self.sources}

    @cached_property
    def critical_bus_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.buses if b.is_critical)

    @property
    def n_critical(self) -> int:
        return len(self.critical_bus_ids)

    @cached_property
    def tie_line_ids(self) -> tuple[str, ...]:
        return tuple(ln.id for ln in self.lines if ln.is_tie)

    @property
    def n_tie_switches(self) -> int:
        return len(self.tie_line_ids)

    @cached_property
    def substation(self) -> Source:
        for s in self.sources:
            if s.kind == "substation":
                return s
        raise NetworkValidationError("network has no substation")

    def effective_source_buses(self) -> tuple[str, ...]:
        """Buses whose sources participate in the current mode.

        Base mode operates from the substation alone; smart mode brings
        every source (substation and DGs) into play.
        """
        if self.mode == "base":
            return (self.substation.bus,)
        return tuple(s.bus for s in self.sources)

    @property
    def total_critical_kw(self) -> float:
        return sum(b.load_kw for b in self.buses if b.is_critical)

    @property
    def total_critical_weight(self) -> float:
        return sum(b.weight for b in self.buses if b.is_critical)

    def with_mode(self, mode: str) -> "Network":
        if mode not in MODES:
            raise NetworkValidationError(f"unknown network mode {mode!r}")
        return Network(self.buses, self.lines, self.sources, mode)


class PathCount(NamedTuple):
    """Result of a simple-path count; ``saturated`` marks a capped total."""

    count: int
    saturated: bool


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

_BUS_FIELDS = {"id", "load_kw", "is_critical", "weight"}
_LINE_FIELDS = {"id", "from_bus", "to_bus", "is_tie", "is_switchable", "fragility"}
_FRAGILITY_FIELDS = {"p_normal", "v_cri", "v_col", "shape_exponent"}
_SOURCE_FIELDS = {"bus", "kind", "capacity_kw", "smart_only"}
_TOP_FIELDS = {"buses", "lines", "sources", "mode"}


def _warn_unknown(fields: dict, known: set[str], where: str) -> None:
    for key in fields:
        if key not in known:
            warnings.warn(f"ignoring unknown field {key!r} in {where}", stacklevel=3)


def _require(fields: dict, key: str, where: str):
    if key not in fields:
        raise NetworkValidationError(f"missing required field {key!r} in {where}")
    return fields[key]


def load_network(path: str | Path) -> Network:
    """Load and validate a network from a JSON file.

    The file holds top-level arrays ``buses``, ``lines`` and ``sources``
    (see the README for the schema). Unknown fields are ignored with a
    warning; structural problems raise NetworkValidationError naming the
    offending entity.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"cannot parse network file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise NetworkFormatError(f"network file {path} must hold a JSON object")
    _warn_unknown(raw, _TOP_FIELDS, f"network file {path.name}")

    buses = []
    for entry in raw.get("buses", []):
        where = f"bus {entry.get('id', '?')!r}"
        _warn_unknown(entry, _BUS_FIELDS, where)
        buses.append(
            Bus(
                id=str(_require(entry, "id", where)),
                load_kw=float(entry.get("load_kw", 0.0)),
                is_critical=bool(entry.get("is_critical", False)),
                weight=float(entry.get("weight", 1.0)),
            )
        )

    lines = []
    for entry in raw.get("lines", []):
        where = f"line {entry.get('id', '?')!r}"
        _warn_unknown(entry, _LINE_FIELDS, where)
        frag_raw = _require(entry, "fragility", where)
        _warn_unknown(frag_raw, _FRAGILITY_FIELDS, f"fragility of {where}")
        try:
            fragility = FragilityCurve(
                p_normal=float(_require(frag_raw, "p_normal", where)),
                v_cri=float(_require(frag_raw, "v_cri", where)),
                v_col=float(_require(frag_raw, "v_col", where)),
                shape_exponent=float(frag_raw.get("shape_exponent", 1.0)),
            )
        except ValueError as exc:
            raise NetworkValidationError(f"invalid fragility curve for {where}: {exc}") from exc
        lines.append(
            Line(
                id=str(_require(entry, "id", where)),
                from_bus=str(_require(entry, "from_bus", where)),
                to_bus=str(_require(entry, "to_bus", where)),
                fragility=fragility,
                is_tie=bool(entry.get("is_tie", False)),
                is_switchable=bool(entry.get("is_switchable", False)),
            )
        )

    sources = []
    for entry in raw.get("sources", []):
        where = f"source at bus {entry.get('bus', '?')!r}"
        _warn_unknown(entry, _SOURCE_FIELDS, where)
        kind = str(_require(entry, "kind", where))
        sources.append(
            Source(
                bus=str(_require(entry, "bus", where)),
                kind=kind,
                capacity_kw=float(_require(entry, "capacity_kw", where)),
                smart_only=bool(entry.get("smart_only", kind == "dg")),
            )
        )

    net = Network(tuple(buses), tuple(lines), tuple(sources), str(raw.get("mode", "base")))
    validate_network(net)
    return net


def validate_network(net: Network) -> None:
    """Check every structural invariant; raise NetworkValidationError on the first hit."""
    if net.mode not in MODES:
        raise NetworkValidationError(f"unknown network mode {net.mode!r}")

    seen_buses: set[str] = set()
    for b in net.buses:
        if b.id in seen_buses:
            raise NetworkValidationError(f"duplicate bus id {b.id!r}")
        seen_buses.add(b.id)
        if b.load_kw < 0:
            raise NetworkValidationError(f"bus {b.id!r} has negative load_kw {b.load_kw}")
        if b.is_critical and b.weight <= 0:
            raise NetworkValidationError(
                f"critical bus {b.id!r} must have positive weight, got {b.weight}"
            )

    seen_lines: set[str] = set()
    for ln in net.lines:
        if ln.id in seen_lines:
            raise NetworkValidationError(f"duplicate line id {ln.id!r}")
        seen_lines.add(ln.id)
        if ln.from_bus == ln.to_bus:
            raise NetworkValidationError(f"line {ln.id!r} connects bus {ln.from_bus!r} to itself")
        for end in (ln.from_bus, ln.to_bus):
            if end not in seen_buses:
                raise NetworkValidationError(f"line {ln.id!r} references unknown bus {end!r}")

    substations = [s for s in net.sources if s.kind == "substation"]
    if len(substations) != 1:
        raise NetworkValidationError(
            f"network must have exactly one substation, found {len(substations)}"
        )
    seen_source_buses: set[str] = set()
    for s in net.sources:
        if s.kind not in ("substation", "dg"):
            raise NetworkValidationError(f"source at bus {s.bus!r} has unknown kind {s.kind!r}")
        if s.bus not in seen_buses:
            raise NetworkValidationError(f"source references unknown bus {s.bus!r}")
        if s.bus in seen_source_buses:
            raise NetworkValidationError(f"more than one source at bus {s.bus!r}")
        seen_source_buses.add(s.bus)
        if s.capacity_kw <= 0:
            raise NetworkValidationError(
                f"source at bus {s.bus!r} must have positive capacity, got {s.capacity_kw}"
            )

    # Intact-topology service guarantee: with no failures and ties open,
    # every critical load must sit in the substation island and the
    # substation must be able to carry the full critical demand.
    if net.critical_bus_ids:
        comp_of = _component_map(net, frozenset(), frozenset())
        sub_comp = comp_of[net.substation.bus]
        for cl in net.critical_bus_ids:
            if comp_of[cl] != sub_comp:
                raise NetworkValidationError(
                    f"critical load {cl!r} is not connected to the substation "
                    "in the intact topology"
                )
        if net.total_critical_kw > net.substation.capacity_kw:
            raise NetworkValidationError(
                f"substation capacity {net.substation.capacity_kw} kW cannot cover "
                f"total critical demand {net.total_critical_kw} kW"
            )


# ---------------------------------------------------------------------------
# Topology queries
# ---------------------------------------------------------------------------


def _check_line_ids(net: Network, ids: Iterable[str]) -> None:
    for lid in ids:
        if lid not in net.line_by_id:
            raise NetworkValidationError(f"unknown line id {lid!r}")


def _component_map(
    net: Network, failed: frozenset[str] | set[str], closed_ties: frozenset[str] | set[str]
) -> dict[str, int]:
    """Union-find component labels; failed wins over closed for ties."""
    index = {b.id: i for i, b in enumerate(net.buses)}
    parent = list(range(len(net.buses)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for ln in net.lines:
        if ln.id in failed:
            continue
        if ln.is_tie and ln.id not in closed_ties:
            continue
        a, b = find(index[ln.from_bus]), find(index[ln.to_bus])
        if a != b:
            parent[b] = a
    return {bus.id: find(index[bus.id]) for bus in net.buses}


def islands(
    net: Network, failed: Iterable[str] = (), closed_ties: Iterable[str] = ()
) -> list[frozenset[str]]:
    """Partition bus ids into connected components.

    Edges are the non-tie lines that did not fail, plus any closed ties
    that did not fail. Every bus lands in exactly one component; order is
    deterministic (by first appearance in bus order).
    """
    failed = frozenset(failed)
    closed_ties = frozenset(closed_ties)
    _check_line_ids(net, failed | closed_ties)
    comp_of = _component_map(net, failed, closed_ties)
    groups: dict[int, list[str]] = {}
    for bus in net.buses:
        groups.setdefault(comp_of[bus.id], []).append(bus.id)
    return [frozenset(members) for members in groups.values()]


def energized_critical_loads(
    net: Network,
    failed: Iterable[str] = (),
    closed_ties: Iterable[str] = (),
    active_sources: Iterable[str] | None = None,
) -> frozenset[str]:
    """Critical-load buses that are served in the given switching state.

    An island serves its critical loads if it contains at least one active
    source and the island's total critical demand fits within the combined
    capacity of its active sources (all-or-nothing per island).

    ``active_sources`` are source bus ids; defaults to the mode-effective
    set of ``net``.
    """
    if active_sources is None:
        active = set(net.effective_source_buses())
    else:
        active = set(active_sources)
        for bus in active:
            if bus not in net.source_by_bus:
                raise NetworkValidationError(f"no source at bus {bus!r}")

    served: set[str] = set()
    for comp in islands(net, failed, closed_ties):
        capacity = sum(net.source_by_bus[b].capacity_kw for b in comp if b in active)
        if capacity <= 0.0:
            continue
        cls_here = [b for b in comp if net.bus_by_id[b].is_critical]
        demand = sum(net.bus_by_id[b].load_kw for b in cls_here)
        if demand <= capacity:
            served.update(cls_here)
    return frozenset(served)


def count_simple_paths(
    net: Network,
    failed: Iterable[str] = (),
    sources: Iterable[str] = (),
    targets: Iterable[str] = (),
    cap: int = DEFAULT_PATH_CAP,
) -> PathCount:
    """Count simple paths from source buses to target buses after failures.

    Paths are vertex sequences with no repeated vertex, summed over every
    (source, target) pair; parallel surviving lines between the same bus
    pair contribute a single adjacency. Tie lines that did not fail are
    traversable (they could be closed). A source that is itself a target
    contributes the trivial zero-length path. Enumeration stops once the
    running total reaches ``cap`` and the result is flagged as saturated.
    """
    if cap <= 0:
        raise ValueError(f"cap must be positive, got {cap}")
    failed = frozenset(failed)
    _check_line_ids(net, failed)
    source_list = sorted(set(sources))
    target_set = set(targets)
    for bus in list(source_list) + list(target_set):
        if bus not in net.bus_by_id:
            raise NetworkValidationError(f"unknown bus id {bus!r}")

    adj: dict[str, list[str]] = {b.id: [] for b in net.buses}
    seen_pairs: set[tuple[str, str]] = set()
    for ln in net.lines:
        if ln.id in failed:
            continue
        pair = (ln.from_bus, ln.to_bus) if ln.from_bus < ln.to_bus else (ln.to_bus, ln.from_bus)
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    for neighbors in adj.values():
        neighbors.sort()

    total = 0
    for src in source_list:
        # Exhaustive backtracking from src: every push of a node v extends
        # a distinct simple path src->v, so arrivals at targets are counted
        # directly without per-pair searches.
        if src in target_set:
            total += 1
            if total >= cap:
                return PathCount(cap, True)
        on_path = {src}
        stack: list[tuple[str, int]] = [(src, 0)]
        while stack:
            node, next_i = stack[-1]
            neighbors = adj[node]
            if next_i >= len(neighbors):
                stack.pop()
                on_path.discard(node)
                continue
            stack[-1] = (node, next_i + 1)
            nxt = neighbors[next_i]
            if nxt in on_path:
                continue
            if nxt in target_set:
                total += 1
                if total >= cap:
                    return PathCount(cap, True)
            on_path.add(nxt)
            stack.append((nxt, 0))
    return PathCount(total, False)
