#!/usr/bin/env python3
"""Regenerates data/standard_map.txt from the adjacency tables below.

The map file format lists every edge in both directions; emitting the file
from an undirected source keeps the symmetry invariant by construction.
"""

import os

WATER = [
    "ADR", "AEG", "BAL", "BAR", "BLA", "BOT", "EAS", "ENG", "HEL", "ION",
    "IRI", "LYO", "MAO", "NAO", "NTH", "NWG", "SKA", "TYS", "WES",
]

LAND = [
    "BOH", "BUD", "BUR", "GAL", "MOS", "MUN", "PAR", "RUH", "SER", "SIL",
    "TYR", "UKR", "VIE", "WAR",
]

COASTAL = [
    "ALB", "ANK", "APU", "ARM", "BEL", "BER", "BRE", "BUL", "CLY", "CON",
    "DEN", "EDI", "FIN", "GAS", "GRE", "HOL", "KIE", "LON", "LVN", "LVP",
    "MAR", "NAF", "NAP", "NWY", "PIC", "PIE", "POR", "PRU", "ROM", "RUM",
    "SEV", "SMY", "SPA", "STP", "SWE", "SYR", "TRI", "TUN", "TUS", "VEN",
    "WAL", "YOR",
]

COASTS = {"STP": ["NC", "SC"], "SPA": ["NC", "SC"], "BUL": ["EC", "SC"]}

HOME = {
    "AUSTRIA": ["VIE", "BUD", "TRI"],
    "ENGLAND": ["LON", "EDI", "LVP"],
    "FRANCE": ["PAR", "MAR", "BRE"],
    "GERMANY": ["BER", "MUN", "KIE"],
    "ITALY": ["ROM", "VEN", "NAP"],
    "RUSSIA": ["MOS", "WAR", "STP", "SEV"],
    "TURKEY": ["CON", "ANK", "SMY"],
}

NEUTRAL_SC = ["NWY", "SWE", "DEN", "HOL", "BEL", "SPA", "POR", "TUN",
              "SER", "RUM", "BUL", "GRE"]

# Army adjacency, undirected, one entry per province.
ARMY = {
    "ALB": ["GRE", "SER", "TRI"],
    "ANK": ["ARM", "CON", "SMY"],
    "APU": ["NAP", "ROM", "VEN"],
    "ARM": ["ANK", "SEV", "SMY", "SYR"],
    "BEL": ["BUR", "HOL", "PIC", "RUH"],
    "BER": ["KIE", "MUN", "PRU", "SIL"],
    "BOH": ["GAL", "MUN", "SIL", "TYR", "VIE"],
    "BRE": ["GAS", "PAR", "PIC"],
    "BUD": ["GAL", "RUM", "SER", "TRI", "VIE"],
    "BUL": ["CON", "GRE", "RUM", "SER"],
    "BUR": ["BEL", "GAS", "MAR", "MUN", "PAR", "PIC", "RUH"],
    "CLY": ["EDI", "LVP"],
    "CON": ["ANK", "BUL", "SMY"],
    "DEN": ["KIE", "SWE"],
    "EDI": ["CLY", "LVP", "YOR"],
    "FIN": ["NWY", "STP", "SWE"],
    "GAL": ["BOH", "BUD", "RUM", "SIL", "UKR", "VIE", "WAR"],
    "GAS": ["BRE", "BUR", "MAR", "PAR", "SPA"],
    "GRE": ["ALB", "BUL", "SER"],
    "HOL": ["BEL", "KIE", "RUH"],
    "KIE": ["BER", "DEN", "HOL", "MUN", "RUH"],
    "LON": ["WAL", "YOR"],
    "LVN": ["MOS", "PRU", "STP", "WAR"],
    "LVP": ["CLY", "EDI", "WAL", "YOR"],
    "MAR": ["BUR", "GAS", "PIE", "SPA"],
    "MOS": ["LVN", "SEV", "STP", "UKR", "WAR"],
    "MUN": ["BER", "BOH", "BUR", "KIE", "RUH", "SIL", "TYR"],
    "NAF": ["TUN"],
    "NAP": ["APU", "ROM"],
    "NWY": ["FIN", "STP", "SWE"],
    "PAR": ["BRE", "BUR", "GAS", "PIC"],
    "PIC": ["BEL", "BRE", "BUR", "PAR"],
    "PIE": ["MAR", "TUS", "TYR", "VEN"],
    "POR": ["SPA"],
    "PRU": ["BER", "LVN", "SIL", "WAR"],
    "ROM": ["APU", "NAP", "TUS", "VEN"],
    "RUH": ["BEL", "BUR", "HOL", "KIE", "MUN"],
    "RUM": ["BUD", "BUL", "GAL", "SER", "SEV", "UKR"],
    "SER": ["ALB", "BUD", "BUL", "GRE", "RUM", "TRI"],
    "SEV": ["ARM", "MOS", "RUM", "UKR"],
    "SIL": ["BER", "BOH", "GAL", "MUN", "PRU", "WAR"],
    "SMY": ["ANK", "ARM", "CON", "SYR"],
    "SPA": ["GAS", "MAR", "POR"],
    "STP": ["FIN", "LVN", "MOS", "NWY"],
    "SWE": ["DEN", "FIN", "NWY"],
    "SYR": ["ARM", "SMY"],
    "TRI": ["ALB", "BUD", "SER", "TYR", "VEN", "VIE"],
    "TUN": ["NAF"],
    "TUS": ["PIE", "ROM", "VEN"],
    "TYR": ["BOH", "MUN", "PIE", "TRI", "VEN", "VIE"],
    "UKR": ["GAL", "MOS", "RUM", "SEV", "WAR"],
    "VEN": ["APU", "PIE", "ROM", "TRI", "TUS", "TYR"],
    "VIE": ["BOH", "BUD", "GAL", "TRI", "TYR"],
    "WAL": ["LON", "LVP", "YOR"],
    "WAR": ["GAL", "LVN", "MOS", "PRU", "SIL", "UKR"],
    "YOR": ["EDI", "LON", "LVP", "WAL"],
}

# Fleet adjacency over coast-qualified locations, undirected.
FLEET = {
    "ADR": ["ALB", "APU", "ION", "TRI", "VEN"],
    "AEG": ["BUL/SC", "CON", "EAS", "GRE", "ION", "SMY"],
    "BAL": ["BER", "BOT", "DEN", "KIE", "LVN", "PRU", "SWE"],
    "BAR": ["NWG", "NWY", "STP/NC"],
    "BLA": ["ANK", "ARM", "BUL/EC", "CON", "RUM", "SEV"],
    "BOT": ["BAL", "FIN", "LVN", "STP/SC", "SWE"],
    "EAS": ["AEG", "ION", "SMY", "SYR"],
    "ENG": ["BEL", "BRE", "IRI", "LON", "MAO", "NTH", "PIC", "WAL"],
    "HEL": ["DEN", "HOL", "KIE", "NTH"],
    "ION": ["ADR", "AEG", "ALB", "APU", "EAS", "GRE", "NAP", "TUN", "TYS"],
    "IRI": ["ENG", "LVP", "MAO", "NAO", "WAL"],
    "LYO": ["MAR", "PIE", "SPA/SC", "TUS", "TYS", "WES"],
    "MAO": ["BRE", "ENG", "GAS", "IRI", "NAF", "NAO", "POR", "SPA/NC",
            "SPA/SC", "WES"],
    "NAO": ["CLY", "IRI", "LVP", "MAO", "NWG"],
    "NTH": ["BEL", "DEN", "EDI", "ENG", "HEL", "HOL", "LON", "NWG", "NWY",
            "SKA", "YOR"],
    "NWG": ["BAR", "CLY", "EDI", "NAO", "NTH", "NWY"],
    "SKA": ["DEN", "NTH", "NWY", "SWE"],
    "TYS": ["ION", "LYO", "NAP", "ROM", "TUN", "TUS", "WES"],
    "WES": ["LYO", "MAO", "NAF", "SPA/SC", "TUN", "TYS"],
    "ALB": ["ADR", "GRE", "ION", "TRI"],
    "ANK": ["ARM", "BLA", "CON"],
    "APU": ["ADR", "ION", "NAP", "VEN"],
    "ARM": ["ANK", "BLA", "SEV"],
    "BEL": ["ENG", "HOL", "NTH", "PIC"],
    "BER": ["BAL", "KIE", "PRU"],
    "BRE": ["ENG", "GAS", "MAO", "PIC"],
    "BUL/EC": ["BLA", "CON", "RUM"],
    "BUL/SC": ["AEG", "CON", "GRE"],
    "CLY": ["EDI", "LVP", "NAO", "NWG"],
    "CON": ["AEG", "ANK", "BLA", "BUL/EC", "BUL/SC", "SMY"],
    "DEN": ["BAL", "HEL", "KIE", "NTH", "SKA", "SWE"],
    "EDI": ["CLY", "NTH", "NWG", "YOR"],
    "FIN": ["BOT", "STP/SC", "SWE"],
    "GAS": ["BRE", "MAO", "SPA/NC"],
    "GRE": ["AEG", "ALB", "BUL/SC", "ION"],
    "HOL": ["BEL", "HEL", "KIE", "NTH"],
    "KIE": ["BAL", "BER", "DEN", "HEL", "HOL"],
    "LON": ["ENG", "NTH", "WAL", "YOR"],
    "LVN": ["BAL", "BOT", "PRU", "STP/SC"],
    "LVP": ["CLY", "IRI", "NAO", "WAL"],
    "MAR": ["LYO", "PIE", "SPA/SC"],
    "NAF": ["MAO", "TUN", "WES"],
    "NAP": ["APU", "ION", "ROM", "TYS"],
    "NWY": ["BAR", "NTH", "NWG", "SKA", "STP/NC", "SWE"],
    "PIC": ["BEL", "BRE", "ENG"],
    "PIE": ["LYO", "MAR", "TUS"],
    "POR": ["MAO", "SPA/NC", "SPA/SC"],
    "PRU": ["BAL", "BER", "LVN"],
    "ROM": ["NAP", "TUS", "TYS"],
    "RUM": ["BLA", "BUL/EC", "SEV"],
    "SEV": ["ARM", "BLA", "RUM"],
    "SMY": ["AEG", "CON", "EAS", "SYR"],
    "SPA/NC": ["GAS", "MAO", "POR"],
    "SPA/SC": ["LYO", "MAO", "MAR", "POR", "WES"],
    "STP/NC": ["BAR", "NWY"],
    "STP/SC": ["BOT", "FIN", "LVN"],
    "SWE": ["BAL", "BOT", "DEN", "FIN", "NWY", "SKA"],
    "SYR": ["EAS", "SMY"],
    "TRI": ["ADR", "ALB", "VEN"],
    "TUN": ["ION", "NAF", "TYS", "WES"],
    "TUS": ["LYO", "PIE", "ROM", "TYS"],
    "VEN": ["ADR", "APU", "TRI"],
    "WAL": ["ENG", "IRI", "LON", "LVP"],
    "YOR": ["EDI", "LON", "NTH"],
}


def check():
    provinces = set(WATER) | set(LAND) | set(COASTAL)
    assert len(provinces) == 75, len(provinces)
    scs = set(NEUTRAL_SC) | {p for hs in HOME.values() for p in hs}
    assert len(scs) == 34, len(scs)
    for a, ns in ARMY.items():
        assert a in LAND or a in COASTAL, a
        for b in ns:
            assert a in ARMY[b], f"army {a}-{b} one-way"
    for a, ns in FLEET.items():
        pa = a.split("/")[0]
        assert pa in provinces and pa not in LAND or pa in ("CON", "DEN", "KIE"), a
        for b in ns:
            assert a in FLEET[b], f"fleet {a}-{b} one-way"
    # every coastal province (or its coasts) appears in the fleet graph
    for p in COASTAL:
        if p in COASTS:
            for c in COASTS[p]:
                assert f"{p}/{c}" in FLEET, p
        else:
            assert p in FLEET, p


def emit(path):
    lines = []
    for p in sorted(WATER + LAND + COASTAL):
        if p in WATER:
            terrain = "WATER"
        elif p in LAND:
            terrain = "LAND"
        else:
            terrain = "COAST"
        parts = ["PROVINCE", p, terrain]
        scs = set(NEUTRAL_SC) | {q for hs in HOME.values() for q in hs}
        if p in scs:
            parts.append("SC")
        for power, homes in HOME.items():
            if p in homes:
                parts += ["HOME", power]
        if p in COASTS:
            parts += ["COASTS", ",".join(COASTS[p])]
        lines.append(" ".join(parts))
    for a in sorted(ARMY):
        for b in sorted(ARMY[a]):
            lines.append(f"EDGE ARMY {a} {b}")
    for a in sorted(FLEET):
        for b in sorted(FLEET[a]):
            lines.append(f"EDGE FLEET {a} {b}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {path}: {len(lines)} lines")


if __name__ == "__main__":
    check()
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    emit(os.path.join(root, "data", "standard_map.txt"))
