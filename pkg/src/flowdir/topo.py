"""Unweighted shortest paths and per-arc betweenness centrality.

Betweenness is computed per directed arc: for each ordered node pair
(s, t), every arc on an s->t shortest path receives the fraction of
shortest paths traversing it, including the pair's first and last arcs.
Totals are normalized by N(N-1). Unreachable pairs contribute nothing.
"""
from __future__ import annotations

import math
from collections import deque

from .netmodel import DirectedNetwork

BetweennessMap = dict[tuple[int, int], float]


def hop_distances(dn: DirectedNetwork) -> dict[int, dict[int, float]]:
    """All-pairs minimum arc counts; unreachable pairs are math.inf."""
    adj = dn.adjacency()
    dist: dict[int, dict[int, float]] = {}
    for source in dn.nodes:
        d = {n: math.inf for n in dn.nodes}
        d[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if math.isinf(d[v]):
                    d[v] = d[u] + 1
                    queue.append(v)
        dist[source] = d
    return dist


def edge_betweenness(dn: DirectedNetwork) -> BetweennessMap:
    """Brandes-style accumulation of normalized per-arc betweenness."""
    n = len(dn.nodes)
    bc = {(arc.tail, arc.head): 0.0 for arc in dn.arcs}
    if n < 2:
        return bc
    adj = dn.adjacency()
    norm = 1.0 / (n * (n - 1))

    for source in dn.nodes:
        sigma = {v: 0 for v in dn.nodes}
        dist = {v: -1 for v in dn.nodes}
        preds: dict[int, list[int]] = {v: [] for v in dn.nodes}
        sigma[source] = 1
        dist[source] = 0
        order: list[int] = []
        queue = deque([source])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = {v: 0.0 for v in dn.nodes}
        for w in reversed(order):
            for v in preds[w]:
                # covers the (source, w) pair itself plus deeper targets
                contribution = sigma[v] / sigma[w] * (1.0 + delta[w])
                bc[(v, w)] += contribution * norm
                delta[v] += contribution
    return bc


def tbc(bc: BetweennessMap) -> float:
    """Total betweenness centrality: the sum over all arcs."""
    return sum(bc.values())


def network_tbc(dn: DirectedNetwork) -> float:
    return tbc(edge_betweenness(dn))
