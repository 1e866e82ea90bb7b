"""Stochastic user-equilibrium assignment via successive averages.

Each iteration perturbs the current BPR travel times with multiplicative
normal noise (perceived costs), loads every O-D's demand all-or-nothing
onto its minimum perceived-cost path, and blends the load into the running
flows with the classic 1/(k+1) step. Ties between equal-cost paths go to
the lexicographically smallest node sequence, which keeps runs bit-stable
for a given seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from heapq import heappush, heappop

import numpy as np

from .netmodel import DirectedNetwork, InfeasibleNetworkError

PERCEPTION_FLOOR = 0.05


def mix64(base_seed: int, code: int) -> int:
    """Derive a per-configuration seed; splitmix64 finalizer over the pair."""
    z = (base_seed ^ (code * 0x9E3779B97F4A7C15)) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SueParams:
    sigma: float = 0.1
    max_iterations: int = 200
    gap_tolerance: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gap_tolerance <= 0:
            raise ValueError("gap_tolerance must be > 0")

    def for_config(self, code: int) -> "SueParams":
        """Copy with the seed mixed against a configuration code."""
        return replace(self, seed=mix64(self.seed, code))


@dataclass(frozen=True)
class AssignmentResult:
    arc_flow: dict[tuple[int, int], float]
    arc_time: dict[tuple[int, int], float]
    stt: float
    tltf: float
    converged: bool
    final_gap: float
    iterations: int


def bpr_time(fft: float, b: float, power: float, flow: float, capacity: float) -> float:
    """t = fft * (1 + b * (flow/capacity)^power)."""
    if capacity <= 0:
        raise ValueError("capacity must be > 0")
    return fft * (1.0 + b * (flow / capacity) ** power)


def stt(result: AssignmentResult) -> float:
    """Recomputed total vehicle-time, for audit against the stored value."""
    return sum(result.arc_flow[key] * result.arc_time[key] for key in result.arc_flow)


def tltf(result: AssignmentResult) -> float:
    return sum(result.arc_flow.values())


def _min_cost_paths(n_nodes: int, adj: list[list[tuple[int, int]]], cost: list[float],
                    source: int) -> list[tuple[int, ...] | None]:
    """Single-source min-cost paths; ties resolved to the lexicographically
    smallest node sequence by keeping whole paths in the heap keys."""
    best: list[tuple[int, ...] | None] = [None] * n_nodes
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (source,))]
    settled = 0
    while heap and settled < n_nodes:
        c, path = heappop(heap)
        u = path[-1]
        if best[u] is not None:
            continue
        best[u] = path
        settled += 1
        for v, arc_idx in adj[u]:
            if best[v] is None:
                heappush(heap, (c + cost[arc_idx], path + (v,)))
    return best


def sue_assign(dn: DirectedNetwork, demand, params: SueParams,
               on_iteration=None) -> AssignmentResult:
    """Run the assignment to a relative-gap stop or the iteration cap.

    The relative gap is sum|y - x| / max(sum x, 1) between the current
    all-or-nothing load y and the running average x; non-converged runs
    return flagged results rather than raising. `on_iteration`, if given,
    receives (k, x, y, perceived_cost) copies after each load step.
    """
    node_ids = sorted(dn.nodes)  # position order == id order, so path ties
    node_pos = {n: i for i, n in enumerate(node_ids)}  # break on real ids
    n_nodes = len(node_ids)
    n_arcs = len(dn.arcs)

    fft = np.array([a.free_flow_time for a in dn.arcs])
    b = np.array([a.bpr_b for a in dn.arcs])
    power = np.array([a.bpr_power for a in dn.arcs])
    capacity = np.array([a.capacity for a in dn.arcs])
    if np.any(capacity <= 0):
        raise ValueError("all arc capacities must be > 0")

    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    arc_of: dict[tuple[int, int], int] = {}
    for idx, arc in enumerate(dn.arcs):
        u, v = node_pos[arc.tail], node_pos[arc.head]
        adj[u].append((v, idx))
        arc_of[(u, v)] = idx

    od_by_origin: dict[int, list[tuple[int, float]]] = {}
    for (o, d), trips in demand.items():
        if trips > 0 and o != d:
            od_by_origin.setdefault(node_pos[o], []).append((node_pos[d], trips))
    for dests in od_by_origin.values():
        dests.sort()

    rng = np.random.default_rng(params.seed)
    x = np.zeros(n_arcs)
    times = fft.copy()
    converged = False
    gap = math.inf
    iterations = 0

    for k in range(params.max_iterations):
        ratio = x / capacity
        times = fft * (1.0 + b * ratio**power)
        noise = rng.standard_normal(n_arcs)
        perceived = times * np.maximum(PERCEPTION_FLOOR, 1.0 + params.sigma * noise)
        if not np.all(np.isfinite(perceived)):
            raise ValueError("non-finite perceived cost encountered")
        cost = perceived.tolist()

        y = np.zeros(n_arcs)
        for origin, dests in sorted(od_by_origin.items()):
            paths = _min_cost_paths(n_nodes, adj, cost, origin)
            for dest, trips in dests:
                path = paths[dest]
                if path is None:
                    raise InfeasibleNetworkError(node_ids[origin], node_ids[dest])
                for u, v in zip(path, path[1:]):
                    y[arc_of[(u, v)]] += trips

        if on_iteration is not None:
            on_iteration(k, x.copy(), y.copy(), perceived.copy())
        iterations = k + 1
        gap = float(np.sum(np.abs(y - x)) / max(float(np.sum(x)), 1.0))
        if gap < params.gap_tolerance:
            converged = True
            break
        x = x + (y - x) / (k + 1)

    ratio = x / capacity
    times = fft * (1.0 + b * ratio**power)
    arc_flow = {(a.tail, a.head): float(x[i]) for i, a in enumerate(dn.arcs)}
    arc_time = {(a.tail, a.head): float(times[i]) for i, a in enumerate(dn.arcs)}
    return AssignmentResult(
        arc_flow=arc_flow,
        arc_time=arc_time,
        stt=float(np.dot(x, times)),
        tltf=float(np.sum(x)),
        converged=converged,
        final_gap=gap,
        iterations=iterations,
    )
