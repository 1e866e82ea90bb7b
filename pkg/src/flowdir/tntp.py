"""Readers and writers for TNTP-style network and trip-table files.

Format: `<KEY> value` header lines up to `<END OF METADATA>`, `~` comment
lines, whitespace-separated arc rows terminated by `;`. Trip tables list
`Origin k` blocks of `dest : flow;` pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .netmodel import ArcAttrs, Link


class TntpError(ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ArcRecord:
    init_node: int
    term_node: int
    capacity: float
    length: float
    free_flow_time: float
    bpr_b: float
    bpr_power: float
    speed: float = 0.0
    toll: float = 0.0
    link_type: float = 1.0

    def __post_init__(self):
        if self.init_node == self.term_node:
            raise TntpError(f"self-loop arc at node {self.init_node}")
        if self.capacity <= 0:
            raise TntpError(f"arc {self.init_node}->{self.term_node}: capacity must be > 0")
        if self.free_flow_time < 0 or self.bpr_b < 0 or self.bpr_power < 0:
            raise TntpError(f"arc {self.init_node}->{self.term_node}: negative BPR parameter")

    def attrs(self) -> ArcAttrs:
        return ArcAttrs(self.capacity, self.free_flow_time, self.bpr_b, self.bpr_power)


@dataclass(frozen=True)
class NetworkDataset:
    metadata: dict[str, int]
    arcs: tuple[ArcRecord, ...]

    def node_ids(self) -> list[int]:
        return sorted({n for a in self.arcs for n in (a.init_node, a.term_node)})


@dataclass(frozen=True)
class DemandMatrix:
    """Trips per (origin, destination); absent and diagonal pairs are zero."""

    zones: tuple[int, ...]
    demand: dict = field(default_factory=dict)

    def get(self, pair: tuple[int, int], default: float = 0.0) -> float:
        return self.demand.get(pair, default)

    def items(self):
        return self.demand.items()

    def total(self) -> float:
        return sum(self.demand.values())

    def positive_pairs(self) -> list[tuple[int, int]]:
        return sorted(pair for pair, trips in self.demand.items() if trips > 0)

    def restrict(self, nodes) -> "DemandMatrix":
        keep = set(nodes)
        return DemandMatrix(
            zones=tuple(z for z in self.zones if z in keep),
            demand={(o, d): t for (o, d), t in self.demand.items() if o in keep and d in keep},
        )

    def scale_origin(self, origin: int, factor: float) -> "DemandMatrix":
        return DemandMatrix(
            zones=self.zones,
            demand={(o, d): (t * factor if o == origin else t) for (o, d), t in self.demand.items()},
        )


def _split_metadata(text: str) -> tuple[dict[str, int], list[tuple[int, str]], int]:
    """Return (metadata, remaining (line_no, line) pairs, end line number)."""
    metadata: dict[str, int] = {}
    lines = text.splitlines()
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        if line == "<END OF METADATA>":
            rest = [(j, lines[j - 1]) for j in range(i + 1, len(lines) + 1)]
            return metadata, rest, i
        if line.startswith("<"):
            key, _, value = line.partition(">")
            key = key[1:].strip()
            value = value.strip()
            try:
                metadata[key] = int(float(value))
            except ValueError:
                pass  # free-text headers (e.g. ORIGINAL HEADER) are not retained
            continue
        raise TntpError("content before <END OF METADATA>", i)
    raise TntpError("missing <END OF METADATA>")


def parse_network(text: str) -> NetworkDataset:
    metadata, rest, _ = _split_metadata(text)
    arcs: list[ArcRecord] = []
    for line_no, raw in rest:
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        if line.endswith(";"):
            line = line[:-1]
        else:
            raise TntpError("arc row not terminated by ';'", line_no)
        fields = line.split()
        if len(fields) != 10:
            raise TntpError(f"expected 10 fields in arc row, got {len(fields)}", line_no)
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise TntpError(f"non-numeric field: {exc}", line_no) from None
        try:
            arcs.append(ArcRecord(
                init_node=int(values[0]),
                term_node=int(values[1]),
                capacity=values[2],
                length=values[3],
                free_flow_time=values[4],
                bpr_b=values[5],
                bpr_power=values[6],
                speed=values[7],
                toll=values[8],
                link_type=values[9],
            ))
        except TntpError as exc:
            raise TntpError(str(exc), line_no) from None

    declared_links = metadata.get("NUMBER OF LINKS")
    if declared_links is not None and declared_links != len(arcs):
        raise TntpError(f"header declares {declared_links} links, file has {len(arcs)}")
    declared_nodes = metadata.get("NUMBER OF NODES")
    if declared_nodes is not None:
        for a in arcs:
            if not (1 <= a.init_node <= declared_nodes and 1 <= a.term_node <= declared_nodes):
                raise TntpError(f"arc {a.init_node}->{a.term_node} outside declared node count")
    return NetworkDataset(metadata=metadata, arcs=tuple(arcs))


def serialize_network(ds: NetworkDataset) -> str:
    lines = [f"<{key}> {value}" for key, value in ds.metadata.items()]
    lines.append("<END OF METADATA>")
    lines.append("")
    lines.append("~ \tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;")
    for a in ds.arcs:
        fields = [a.init_node, a.term_node, a.capacity, a.length, a.free_flow_time,
                  a.bpr_b, a.bpr_power, a.speed, a.toll, a.link_type]
        lines.append("\t" + "\t".join(_num(v) for v in fields) + "\t;")
    return "\n".join(lines) + "\n"


def _num(x) -> str:
    f = float(x)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def parse_trips(text: str) -> DemandMatrix:
    metadata, rest, _ = _split_metadata(text)
    demand: dict[tuple[int, int], float] = {}
    zones: list[int] = []
    origin: int | None = None
    raw_total = 0.0
    for line_no, raw in rest:
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        if line.lower().startswith("origin"):
            try:
                origin = int(line.split()[1])
            except (IndexError, ValueError):
                raise TntpError(f"malformed Origin line {line!r}", line_no) from None
            if origin not in zones:
                zones.append(origin)
            continue
        if origin is None:
            raise TntpError("destination row before any Origin line", line_no)
        for entry in line.split(";"):
            entry = entry.strip()
            if not entry:
                continue
            dest_s, sep, flow_s = entry.partition(":")
            if not sep:
                raise TntpError(f"malformed trip entry {entry!r}", line_no)
            try:
                dest = int(dest_s)
                flow = float(flow_s)
            except ValueError:
                raise TntpError(f"non-numeric trip entry {entry!r}", line_no) from None
            if not math.isfinite(flow) or flow < 0:
                raise TntpError(f"negative or non-finite demand for ({origin}, {dest})", line_no)
            if (origin, dest) in demand:
                raise TntpError(f"duplicate demand pair ({origin}, {dest})", line_no)
            raw_total += flow
            # intra-zonal trips never route; treated as zero
            demand[(origin, dest)] = 0.0 if origin == dest else flow
            if dest not in zones:
                zones.append(dest)

    declared = metadata.get("TOTAL OD FLOW")
    if declared is not None and abs(raw_total - declared) > max(1e-6 * declared, 1e-6):
        raise TntpError(f"header declares total flow {declared}, file sums to {raw_total}")
    return DemandMatrix(zones=tuple(sorted(zones)),
                        demand={k: v for k, v in demand.items() if v > 0})


def serialize_trips(matrix: DemandMatrix, per_line: int = 5) -> str:
    lines = [
        f"<NUMBER OF ZONES> {len(matrix.zones)}",
        f"<TOTAL OD FLOW> {_num(matrix.total())}",
        "<END OF METADATA>",
        "",
    ]
    for o in matrix.zones:
        lines.append(f"Origin {o}")
        row = []
        for i, d in enumerate(matrix.zones, start=1):
            row.append(f"{d} : {_num(matrix.get((o, d)))};")
            if i % per_line == 0:
                lines.append("    " + " ".join(row))
                row = []
        if row:
            lines.append("    " + " ".join(row))
        lines.append("")
    return "\n".join(lines) + "\n"


def extract_subnetwork(net: NetworkDataset, trips: DemandMatrix,
                       nodes) -> tuple[list[Link], DemandMatrix]:
    """Induced undirected subnetwork on a node set, plus restricted demand.

    Each unordered pair {a, b} with at least one arc in the dataset becomes
    one Link carrying both directions' attributes; a missing reverse arc is
    mirrored from the forward one and flagged.
    """
    node_set = set(nodes)
    if len(node_set) < 2:
        raise TntpError("need at least two nodes to extract a subnetwork")
    known = set(net.node_ids())
    missing = sorted(node_set - known)
    if missing:
        raise TntpError(f"nodes not in dataset: {missing}")

    by_pair: dict[tuple[int, int], dict[tuple[int, int], ArcRecord]] = {}
    for arc in net.arcs:
        if arc.init_node in node_set and arc.term_node in node_set:
            key = (min(arc.init_node, arc.term_node), max(arc.init_node, arc.term_node))
            by_pair.setdefault(key, {})[(arc.init_node, arc.term_node)] = arc

    links: list[Link] = []
    for (a, b), directions in sorted(by_pair.items()):
        fwd = directions.get((a, b))
        bwd = directions.get((b, a))
        copied = fwd is None or bwd is None
        fwd_attrs = (fwd or bwd).attrs()
        bwd_attrs = (bwd or fwd).attrs()
        links.append(Link(a=a, b=b, fwd=fwd_attrs, bwd=bwd_attrs, reverse_copied=copied))

    if not links:
        raise TntpError("disconnected selection: no arcs between the requested nodes")
    return links, trips.restrict(node_set)


def load_network(path: str | Path) -> NetworkDataset:
    return parse_network(Path(path).read_text())


def load_trips(path: str | Path) -> DemandMatrix:
    return parse_trips(Path(path).read_text())


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def load_sioux_falls() -> tuple[NetworkDataset, DemandMatrix]:
    """The bundled Sioux Falls dataset (24 nodes, 76 arcs)."""
    return (load_network(bundled_path("SiouxFalls_net.tntp")),
            load_trips(bundled_path("SiouxFalls_trips.tntp")))
