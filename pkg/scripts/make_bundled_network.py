#!/usr/bin/env python3
"""Regenerate the bundled 123-bus demo feeder (deterministic).

Layout: a 20-bus trunk fed by the substation at b001, four long laterals
rooted at trunk buses, and a handful of short spurs. Four DGs sit deep in
the laterals sized to carry their lateral's critical demand; six
normally-open tie switches link lateral ends so the smart mode has
switching options. Rerunning the script reproduces the same file byte for
byte.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "gridres" / "data" / "ieee123-like.json"

N_BUSES = 123
TRUNK_LEN = 20
LATERAL_ROOTS = {"A": 5, "B": 10, "C": 15, "D": 20}
LATERAL_SIZE = 24  # buses per lateral; remainder becomes trunk spurs
P_NORMAL = 0.001
SUBSTATION_KW = 20000.0


def bus_name(i: int) -> str:
    return f"b{i:03d}"


def main() -> None:
    rng = random.Random(123)

    parent: dict[int, int] = {}
    region: dict[int, str] = {1: "trunk"}
    for i in range(2, TRUNK_LEN + 1):
        parent[i] = i - 1
        region[i] = "trunk"

    nxt = TRUNK_LEN + 1
    lateral_members: dict[str, list[int]] = {}
    for name, root in LATERAL_ROOTS.items():
        members: list[int] = []
        tip = root
        for _ in range(LATERAL_SIZE):
            if members and rng.random() < 0.30:
                attach = rng.choice(members)
            else:
                attach = tip
            parent[nxt] = attach
            region[nxt] = name
            members.append(nxt)
            if attach == tip:
                tip = nxt
            nxt += 1
        lateral_members[name] = members

    while nxt <= N_BUSES:  # short spurs off the trunk
        parent[nxt] = rng.randrange(2, TRUNK_LEN + 1)
        region[nxt] = "trunk"
        nxt += 1

    # Critical loads: four per lateral, spread along it.
    critical: set[int] = set()
    for members in lateral_members.values():
        picks = [members[3], members[9], members[15], members[21]]
        critical.update(picks)

    buses = []
    for i in range(1, N_BUSES + 1):
        is_cl = i in critical
        load = float(rng.randint(50, 120)) if is_cl else float(rng.randint(10, 60))
        entry = {"id": bus_name(i), "load_kw": load, "is_critical": is_cl}
        if is_cl:
            entry["weight"] = float(rng.choice([1, 2, 3]))
        buses.append(entry)

    def fragility() -> dict:
        v_cri = round(rng.uniform(20.0, 30.0), 1)
        v_col = round(v_cri + rng.uniform(22.0, 32.0), 1)
        return {"p_normal": P_NORMAL, "v_cri": v_cri, "v_col": v_col, "shape_exponent": 1.0}

    lines = []
    for child in sorted(parent):
        a, b = parent[child], child
        lines.append(
            {
                "id": f"l{a:03d}_{b:03d}",
                "from_bus": bus_name(a),
                "to_bus": bus_name(b),
                "is_tie": False,
                "is_switchable": False,
                "fragility": fragility(),
            }
        )

    # Tie switches between lateral tips and back to the trunk.
    def tip(name: str) -> int:
        return lateral_members[name][-1]

    tie_pairs = [
        (tip("A"), tip("B")),
        (tip("B"), tip("C")),
        (tip("C"), tip("D")),
        (tip("A"), lateral_members["C"][10]),
        (tip("D"), TRUNK_LEN),
        (lateral_members["B"][12], lateral_members["D"][12]),
    ]
    for k, (a, b) in enumerate(tie_pairs, start=1):
        lines.append(
            {
                "id": f"tie{k:02d}",
                "from_bus": bus_name(a),
                "to_bus": bus_name(b),
                "is_tie": True,
                "is_switchable": True,
                "fragility": fragility(),
            }
        )

    cl_kw = {e["id"]: e["load_kw"] for e in buses if e["is_critical"]}
    sources = [
        {"bus": bus_name(1), "kind": "substation", "capacity_kw": SUBSTATION_KW, "smart_only": False}
    ]
    for name, members in lateral_members.items():
        demand = sum(cl_kw.get(bus_name(i), 0.0) for i in members)
        dg_bus = members[12]
        sources.append(
            {
                "bus": bus_name(dg_bus),
                "kind": "dg",
                "capacity_kw": float(round(1.25 * demand, -1)),
                "smart_only": True,
            }
        )

    doc = {"buses": buses, "lines": lines, "sources": sources}
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    n_cl = sum(1 for b in buses if b["is_critical"])
    n_tie = sum(1 for l in lines if l["is_tie"])
    print(f"wrote {OUT}: {len(buses)} buses, {len(lines)} lines "
          f"({n_tie} ties), {len(sources)} sources, {n_cl} critical loads")


if __name__ == "__main__":
    main()
