"""Directionality configurations and the directed networks they induce.

A road network is a list of undirected links; each link independently
operates two-way, one-way forward (low node -> high node) or one-way
backward. A full assignment of orientations is a Configuration, encodable
as a base-3 integer, which makes the 3^L search space enumerable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator

DEFAULT_LINK_GUARD = 16


class ConfigurationError(ValueError):
    pass


class InfeasibleNetworkError(RuntimeError):
    """Raised when a positive-demand O-D pair has no directed path."""

    def __init__(self, origin: int, destination: int):
        self.origin = origin
        self.destination = destination
        super().__init__(f"no directed path for demand pair {origin} -> {destination}")


class Orientation(IntEnum):
    TWO_WAY = 0
    FORWARD = 1
    BACKWARD = 2

    @classmethod
    def from_name(cls, name: str) -> "Orientation":
        key = name.strip().lower().replace("-", "_")
        try:
            return {"two_way": cls.TWO_WAY, "forward": cls.FORWARD, "backward": cls.BACKWARD}[key]
        except KeyError:
            raise ConfigurationError(f"unknown orientation {name!r}") from None

    def to_name(self) -> str:
        return ("two_way", "forward", "backward")[self]


@dataclass(frozen=True)
class ArcAttrs:
    """Per-direction physical attributes of a roadway."""

    capacity: float
    free_flow_time: float
    bpr_b: float
    bpr_power: float


@dataclass(frozen=True)
class Link:
    """Undirected link between nodes a < b with per-direction attributes.

    `reverse_copied` marks links whose source data had an arc in only one
    direction, so the missing direction's attributes were mirrored.
    """

    a: int
    b: int
    fwd: ArcAttrs
    bwd: ArcAttrs
    reverse_copied: bool = False

    def __post_init__(self):
        if self.a >= self.b:
            raise ConfigurationError(f"link endpoints must satisfy a < b, got ({self.a}, {self.b})")

    @property
    def nodes(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Configuration:
    """Fixed-length orientation vector, one entry per link index."""

    orientations: tuple[Orientation, ...]

    def __len__(self) -> int:
        return len(self.orientations)

    @property
    def code(self) -> int:
        return encode(self)

    def trits(self) -> str:
        """Digit string with link 0 leftmost, e.g. '012000210'."""
        return "".join(str(int(o)) for o in self.orientations)

    def with_orientation(self, link_index: int, orientation: Orientation) -> "Configuration":
        items = list(self.orientations)
        items[link_index] = orientation
        return Configuration(tuple(items))

    @classmethod
    def all_two_way(cls, n_links: int) -> "Configuration":
        return cls((Orientation.TWO_WAY,) * n_links)

    @classmethod
    def from_trits(cls, trits: str) -> "Configuration":
        if not trits or any(c not in "012" for c in trits):
            raise ConfigurationError(f"invalid trits string {trits!r}")
        return cls(tuple(Orientation(int(c)) for c in trits))


def encode(config: Configuration) -> int:
    """Base-3 code with link 0 as the least-significant digit."""
    code = 0
    for i, o in enumerate(config.orientations):
        code += int(o) * 3**i
    return code


def decode(code: int, n_links: int) -> Configuration:
    if not 0 <= code < 3**n_links:
        raise ConfigurationError(f"code {code} out of range for {n_links} links")
    digits = []
    rest = code
    for _ in range(n_links):
        rest, digit = divmod(rest, 3)
        digits.append(Orientation(digit))
    return Configuration(tuple(digits))


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: float
    free_flow_time: float
    bpr_b: float
    bpr_power: float


@dataclass(frozen=True)
class DirectedNetwork:
    """Arc set induced by a Configuration (plus any injected arcs)."""

    nodes: tuple[int, ...]
    arcs: tuple[Arc, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for i, arc in enumerate(self.arcs):
            key = (arc.tail, arc.head)
            if key in index:
                raise ConfigurationError(f"duplicate arc {arc.tail} -> {arc.head}")
            index[key] = i
        object.__setattr__(self, "_index", index)

    def arc_index(self, tail: int, head: int) -> int:
        return self._index[(tail, head)]

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {n: [] for n in self.nodes}
        for arc in self.arcs:
            adj[arc.tail].append(arc.head)
        return adj


def directed_view(links: list[Link], config: Configuration,
                  contraflow_capacity_merge: bool = False) -> DirectedNetwork:
    """Build the directed arc set for a configuration.

    A two-way link yields both antiparallel arcs; a one-way link yields the
    single arc of its orientation, keeping that direction's own attributes.
    With `contraflow_capacity_merge` a one-way arc instead absorbs the sum
    of both directions' capacities.
    """
    if len(links) != len(config):
        raise ConfigurationError(
            f"configuration has {len(config)} entries for {len(links)} links")
    nodes = sorted({n for link in links for n in link.nodes})
    arcs: list[Arc] = []

    def make(tail: int, head: int, attrs: ArcAttrs, other: ArcAttrs, merged: bool) -> Arc:
        cap = attrs.capacity + other.capacity if merged else attrs.capacity
        return Arc(tail, head, cap, attrs.free_flow_time, attrs.bpr_b, attrs.bpr_power)

    for link, orient in zip(links, config.orientations):
        if orient is Orientation.TWO_WAY:
            arcs.append(make(link.a, link.b, link.fwd, link.bwd, False))
            arcs.append(make(link.b, link.a, link.bwd, link.fwd, False))
        elif orient is Orientation.FORWARD:
            arcs.append(make(link.a, link.b, link.fwd, link.bwd, contraflow_capacity_merge))
        else:
            arcs.append(make(link.b, link.a, link.bwd, link.fwd, contraflow_capacity_merge))
    return DirectedNetwork(tuple(nodes), tuple(arcs))


def _reachable(adj: dict[int, list[int]], source: int) -> set[int]:
    seen = {source}
    stack = [source]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_feasible(dn: DirectedNetwork, demand) -> bool:
    """True iff every positive-demand O-D pair has a directed path."""
    missing = first_disconnected_pair(dn, demand)
    return missing is None


def first_disconnected_pair(dn: DirectedNetwork, demand) -> tuple[int, int] | None:
    """First (origin, destination) in ascending zone order lacking a path."""
    adj = dn.adjacency()
    node_set = set(dn.nodes)
    dests_by_origin: dict[int, list[int]] = {}
    for (o, d), trips in demand.items():
        if trips > 0 and o != d:
            if o not in node_set or d not in node_set:
                raise ConfigurationError(f"demand pair ({o}, {d}) references unknown node")
            dests_by_origin.setdefault(o, []).append(d)
    for origin in sorted(dests_by_origin):
        seen = _reachable(adj, origin)
        for dest in sorted(dests_by_origin[origin]):
            if dest not in seen:
                return (origin, dest)
    return None


def _demand_pairs(links: list[Link], demand) -> tuple[dict[int, int], list[tuple[int, int]]]:
    node_ids = sorted({n for link in links for n in link.nodes})
    node_pos = {n: i for i, n in enumerate(node_ids)}
    pairs = []
    for (o, d), trips in demand.items():
        if trips > 0 and o != d:
            if o not in node_pos or d not in node_pos:
                raise ConfigurationError(f"demand pair ({o}, {d}) references unknown node")
            pairs.append((node_pos[o], node_pos[d]))
    return node_pos, pairs


def _feasible_codes(links: list[Link], demand) -> Iterator[int]:
    """Fast scan over all 3^L codes using bitmask reachability."""
    node_pos, pairs = _demand_pairs(links, demand)
    n = len(node_pos)
    link_ends = [(node_pos[link.a], node_pos[link.b]) for link in links]
    dests_by_origin: dict[int, int] = {}
    for o, d in pairs:
        dests_by_origin[o] = dests_by_origin.get(o, 0) | (1 << d)

    n_links = len(links)
    for code in range(3**n_links):
        adj = [0] * n
        rest = code
        for a, b in link_ends:
            rest, digit = divmod(rest, 3)
            if digit == 0:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
            elif digit == 1:
                adj[a] |= 1 << b
            else:
                adj[b] |= 1 << a
        ok = True
        for origin, want in dests_by_origin.items():
            seen = 1 << origin
            frontier = seen
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    low = f & -f
                    nxt |= adj[low.bit_length() - 1]
                    f ^= low
                frontier = nxt & ~seen
                seen |= nxt
                if seen & want == want:
                    break
            if seen & want != want:
                ok = False
                break
        if ok:
            yield code


def enumerate_feasible(links: list[Link], demand,
                       max_links: int = DEFAULT_LINK_GUARD) -> Iterator[tuple[int, Configuration]]:
    """Yield (code, Configuration) for every feasible code, ascending.

    Guards against accidental combinatorial blowups: pass a larger
    `max_links` explicitly to sweep more than 3^16 configurations.
    """
    n_links = len(links)
    if n_links > max_links:
        raise ConfigurationError(
            f"{n_links} links means 3^{n_links} configurations; "
            f"pass max_links={n_links} to override the guard of {max_links}")
    for code in _feasible_codes(links, demand):
        yield code, decode(code, n_links)


@dataclass(frozen=True)
class FeasibilityDiagnostics:
    """Census of the configuration space under several feasibility readings."""

    n_links: int
    total: int
    feasible_by_demand: int
    strongly_connected: int
    feasible_excluding_all_two_way: int
    zero_demand_pairs: tuple[tuple[int, int], ...]


def feasibility_diagnostics(links: list[Link], demand,
                            max_links: int = DEFAULT_LINK_GUARD) -> FeasibilityDiagnostics:
    """Count feasible codes under the demand rule and under strong connectivity.

    The two counts coincide when every ordered node pair carries demand;
    zero-demand pairs relax the rule and can only increase the first count.
    """
    n_links = len(links)
    if n_links > max_links:
        raise ConfigurationError(f"{n_links} links exceeds guard {max_links}")
    node_ids = sorted({n for link in links for n in link.nodes})
    feasible = list(_feasible_codes(links, demand))

    dense = {(o, d): 1.0 for o in node_ids for d in node_ids if o != d}
    strong = sum(1 for _ in _feasible_codes(links, dense))

    zero_pairs = tuple(
        (o, d) for o in node_ids for d in node_ids
        if o != d and demand.get((o, d), 0.0) <= 0.0)
    all_two_way = 0 in feasible
    return FeasibilityDiagnostics(
        n_links=n_links,
        total=3**n_links,
        feasible_by_demand=len(feasible),
        strongly_connected=strong,
        feasible_excluding_all_two_way=len(feasible) - (1 if all_two_way else 0),
        zero_demand_pairs=zero_pairs,
    )
