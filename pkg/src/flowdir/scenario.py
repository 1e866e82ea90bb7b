"""Operational scenarios: locked orientations, injected arcs, demand surges.

A scenario constrains the search space (locked links must hold their
orientation), may inject extra directed arcs that live outside the base-3
configuration vector, and may scale demand by origin. Scenario results are
compared against a baseline row via percent change in system travel time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

from . import mcda
from .netmodel import (Arc, Configuration, ConfigurationError, DirectedNetwork,
                       InfeasibleNetworkError, Link, Orientation, directed_view,
                       first_disconnected_pair)
from .sue import SueParams, sue_assign
from .sweep import SweepDataset
from .tntp import DemandMatrix
from .topo import network_tbc


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class AddedArc:
    tail: int
    head: int
    capacity: float
    free_flow_time: float
    bpr_b: float
    bpr_power: float

    def to_arc(self) -> Arc:
        return Arc(self.tail, self.head, self.capacity, self.free_flow_time,
                   self.bpr_b, self.bpr_power)


@dataclass(frozen=True)
class Scenario:
    name: str
    forced_orientations: dict = field(default_factory=dict)  # link index -> Orientation
    added_arcs: tuple[AddedArc, ...] = ()
    demand_multipliers: dict = field(default_factory=dict)  # origin -> factor
    demand_override: DemandMatrix | None = None

    def validate(self, links: list[Link]) -> None:
        for idx in self.forced_orientations:
            if not 0 <= idx < len(links):
                raise ScenarioError(f"forced orientation on unknown link index {idx}")
        nodes = {n for link in links for n in link.nodes}
        for arc in self.added_arcs:
            if arc.tail not in nodes or arc.head not in nodes:
                raise ScenarioError(
                    f"added arc {arc.tail}->{arc.head} references nodes outside the network")

    def permits(self, config: Configuration) -> bool:
        return all(config.orientations[idx] == want
                   for idx, want in self.forced_orientations.items())

    def apply_locks(self, config: Configuration) -> Configuration:
        """Force the locked links' orientations onto a configuration."""
        out = config
        for idx, want in self.forced_orientations.items():
            out = out.with_orientation(idx, want)
        return out

    def effective_demand(self, demand: DemandMatrix) -> DemandMatrix:
        if self.demand_override is not None:
            demand = self.demand_override
        for origin, factor in self.demand_multipliers.items():
            demand = demand.scale_origin(origin, factor)
        return demand


@dataclass(frozen=True)
class ScenarioMetrics:
    scenario: str
    code: int
    trits: str
    tbc: float
    tltf: float
    stt: float
    dcs: float
    converged: bool
    gap: float
    iterations: int


def _scenario_network(links: list[Link], scenario: Scenario,
                      config: Configuration) -> DirectedNetwork:
    dn = directed_view(links, config)
    if not scenario.added_arcs:
        return dn
    arcs = list(dn.arcs) + [a.to_arc() for a in scenario.added_arcs]
    return DirectedNetwork(dn.nodes, tuple(arcs))


def evaluate_scenario(links: list[Link], demand: DemandMatrix, scenario: Scenario,
                      config: Configuration, params: SueParams,
                      model: mcda.ScoreModel) -> ScenarioMetrics:
    """Metrics and score for one configuration under a scenario."""
    scenario.validate(links)
    if not scenario.permits(config):
        violating = [idx for idx, want in scenario.forced_orientations.items()
                     if config.orientations[idx] != want]
        raise ScenarioError(
            f"configuration violates locked orientation on link index {violating[0]}")
    dn = _scenario_network(links, scenario, config)
    effective = scenario.effective_demand(demand)
    missing = first_disconnected_pair(dn, effective)
    if missing is not None:
        raise InfeasibleNetworkError(*missing)

    code = config.code
    result = sue_assign(dn, effective, params.for_config(code))
    tbc = network_tbc(dn)
    dcs = mcda.score(model, (tbc, result.tltf, result.stt))
    return ScenarioMetrics(
        scenario=scenario.name,
        code=code,
        trits=config.trits(),
        tbc=tbc,
        tltf=result.tltf,
        stt=result.stt,
        dcs=dcs,
        converged=result.converged,
        gap=result.final_gap,
        iterations=result.iterations,
    )


def best_under_constraints(links: list[Link], demand: DemandMatrix, scenario: Scenario,
                           params: SueParams, model: mcda.ScoreModel,
                           ) -> tuple[Configuration, ScenarioMetrics]:
    """Exhaustive search of the locked subspace for the highest score.

    Ties go to the lower system travel time, then the lower code.
    """
    scenario.validate(links)
    n_links = len(links)
    free = [i for i in range(n_links) if i not in scenario.forced_orientations]
    base = [Orientation.TWO_WAY] * n_links
    for idx, want in scenario.forced_orientations.items():
        base[idx] = want

    best: tuple | None = None
    for combo in product((Orientation.TWO_WAY, Orientation.FORWARD, Orientation.BACKWARD),
                         repeat=len(free)):
        digits = list(base)
        for idx, orient in zip(free, combo):
            digits[idx] = orient
        config = Configuration(tuple(digits))
        try:
            metrics = evaluate_scenario(links, demand, scenario, config, params, model)
        except InfeasibleNetworkError:
            continue
        key = (-metrics.dcs, metrics.stt, metrics.code)
        if best is None or key < best[0]:
            best = (key, config, metrics)
    if best is None:
        raise ScenarioError(f"no feasible configuration satisfies scenario {scenario.name!r}")
    return best[1], best[2]


@dataclass(frozen=True)
class ComparisonRow:
    scenario: str
    code: int
    trits: str
    tbc: float
    tltf: float
    stt: float
    dcs: float
    pct_change_stt: float


@dataclass(frozen=True)
class Comparison:
    rows: tuple[ComparisonRow, ...]
    baseline_index: int

    def improvement_between(self, from_index: int, to_index: int) -> float:
        """Percent of baseline STT recovered moving between two rows."""
        base = self.rows[self.baseline_index].stt
        return (self.rows[from_index].stt - self.rows[to_index].stt) / base * 100.0


def compare(rows: list[ScenarioMetrics], baseline_index: int = 0) -> Comparison:
    """Percent change in STT relative to the baseline row.

    Positive means improvement (lower STT); degradations come out negative,
    matching the reporting convention of evaluations against a pre-event
    optimum.
    """
    if not 0 <= baseline_index < len(rows):
        raise ScenarioError(f"baseline index {baseline_index} out of range")
    base = rows[baseline_index].stt
    if base == 0:
        raise ScenarioError("baseline STT is zero; percent change undefined")
    out = []
    for row in rows:
        pct = (base - row.stt) / base * 100.0
        out.append(ComparisonRow(
            scenario=row.scenario, code=row.code, trits=row.trits, tbc=row.tbc,
            tltf=row.tltf, stt=row.stt, dcs=row.dcs, pct_change_stt=pct))
    return Comparison(rows=tuple(out), baseline_index=baseline_index)


def best_from_sweep(ds: SweepDataset, model: mcda.ScoreModel) -> tuple[int, float]:
    """Top-scoring code in a sweep dataset (tie: lower STT, then lower code)."""
    if not ds.records:
        raise ScenarioError("empty sweep dataset")
    best = min(ds.records,
               key=lambda r: (-mcda.score(model, (r.tbc, r.tltf, r.stt)), r.stt, r.code))
    return best.code, mcda.score(model, (best.tbc, best.tltf, best.stt))


CASE_STUDY_NODES = (5, 6, 8, 9, 10, 16, 17)
_EVACUATION_LOCKS = ((5, 6), (6, 8), (8, 16))
_INTERVENTION = (16, 17)


def case_study_preset(links: list[Link], surge: float = 1.0) -> list[Scenario]:
    """The three evacuation-planning scenarios on the 7-node subnetwork.

    A: unconstrained. B: two-way operation locked on 5-6, 6-8 and 8-16 and
    the 16->17 direction closed (link 16-17 held backward). C: B plus a
    single injected 16->17 arc restoring that direction at full capacity.
    `surge` scales demand originating at the evacuating node 9.
    """
    index_of = {link.nodes: i for i, link in enumerate(links)}
    missing = [pair for pair in _EVACUATION_LOCKS + (_INTERVENTION,) if pair not in index_of]
    if missing:
        raise ScenarioError(f"network lacks case-study links {missing}; "
                            f"expected the subnetwork on nodes {CASE_STUDY_NODES}")

    locks = {index_of[pair]: Orientation.TWO_WAY for pair in _EVACUATION_LOCKS}
    locks[index_of[_INTERVENTION]] = Orientation.BACKWARD

    inter_link = links[index_of[_INTERVENTION]]
    added = AddedArc(
        tail=_INTERVENTION[0], head=_INTERVENTION[1],
        capacity=inter_link.fwd.capacity, free_flow_time=inter_link.fwd.free_flow_time,
        bpr_b=inter_link.fwd.bpr_b, bpr_power=inter_link.fwd.bpr_power)

    multipliers = {9: surge} if surge != 1.0 else {}
    return [
        Scenario(name="A"),
        Scenario(name="B", forced_orientations=dict(locks), demand_multipliers=dict(multipliers)),
        Scenario(name="C", forced_orientations=dict(locks), added_arcs=(added,),
                 demand_multipliers=dict(multipliers)),
    ]


def scenario_to_json(scenario: Scenario) -> str:
    return mcda.canonical_json({
        "name": scenario.name,
        "forced_orientations": {str(i): o.to_name()
                                for i, o in sorted(scenario.forced_orientations.items())},
        "added_arcs": [{"tail": a.tail, "head": a.head, "capacity": a.capacity,
                        "fft": a.free_flow_time, "b": a.bpr_b, "power": a.bpr_power}
                       for a in scenario.added_arcs],
        "demand_multipliers": {str(o): f for o, f in sorted(scenario.demand_multipliers.items())},
    })


def scenario_from_json(text: str) -> Scenario:
    try:
        doc = json.loads(text)
        forced = {int(i): Orientation.from_name(name)
                  for i, name in doc.get("forced_orientations", {}).items()}
        added = tuple(AddedArc(tail=int(a["tail"]), head=int(a["head"]),
                               capacity=float(a["capacity"]), free_flow_time=float(a["fft"]),
                               bpr_b=float(a["b"]), bpr_power=float(a["power"]))
                      for a in doc.get("added_arcs", []))
        multipliers = {int(o): float(f) for o, f in doc.get("demand_multipliers", {}).items()}
        return Scenario(name=str(doc["name"]), forced_orientations=forced,
                        added_arcs=added, demand_multipliers=multipliers)
    except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
        raise ScenarioError(f"malformed scenario document: {exc}") from None


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_json(Path(path).read_text())


def comparison_to_csv(comparison: Comparison) -> str:
    lines = ["scenario,code,trits,tbc,tltf,stt,dcs,pct_change_stt"]
    for row in comparison.rows:
        lines.append(",".join([
            row.scenario, str(row.code), row.trits, repr(row.tbc), repr(row.tltf),
            repr(row.stt), repr(row.dcs), repr(row.pct_change_stt)]))
    return "\n".join(lines) + "\n"


def comparison_table(comparison: Comparison) -> str:
    """Fixed-width table for terminal display."""
    headers = ["scenario", "code", "trits", "tbc", "tltf", "stt", "dcs", "% change stt"]
    rows = [[row.scenario, str(row.code), row.trits, f"{row.tbc:.4f}", f"{row.tltf:.1f}",
             f"{row.stt:.2f}", f"{row.dcs:.3f}", f"{row.pct_change_stt:+.2f}%"]
            for row in comparison.rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*["-" * w for w in widths])]
    lines += [fmt.format(*r) for r in rows]
    return "\n".join(lines) + "\n"
