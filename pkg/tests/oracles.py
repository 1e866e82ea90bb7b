"""Independent reference implementations the fast code is checked against.

Deliberately naive: transitive closure by Floyd-Warshall, betweenness by
enumerating every shortest path, least squares by explicit matrix
inversion. Nothing here shares code with the package internals.
"""
from __future__ import annotations

import numpy as np

from flowdir.netmodel import DirectedNetwork, Link, Orientation


def orientation_arcs(links, digits):
    arcs = []
    for link, digit in zip(links, digits):
        if digit == Orientation.TWO_WAY:
            arcs.append((link.a, link.b))
            arcs.append((link.b, link.a))
        elif digit == Orientation.FORWARD:
            arcs.append((link.a, link.b))
        else:
            arcs.append((link.b, link.a))
    return arcs


def closure_feasible(links: list[Link], demand, digits) -> bool:
    """Positive-demand reachability via Floyd-Warshall transitive closure."""
    nodes = sorted({n for link in links for n in link.nodes})
    pos = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for a, b in orientation_arcs(links, digits):
        reach[pos[a]][pos[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_i, row_k = reach[i], reach[k]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    for (o, d), trips in demand.items():
        if trips > 0 and o != d and not reach[pos[o]][pos[d]]:
            return False
    return True


def full_scan_feasible_codes(links: list[Link], demand) -> list[int]:
    from itertools import product

    n_links = len(links)
    codes = []
    orients = (Orientation.TWO_WAY, Orientation.FORWARD, Orientation.BACKWARD)
    for digits in product(orients, repeat=n_links):
        # digits[0] is link 0 = least-significant base-3 digit
        code = sum(int(d) * 3**i for i, d in enumerate(digits))
        if closure_feasible(links, demand, digits):
            codes.append(code)
    return sorted(codes)


def full_scan_feasible_codes_matrix(links: list[Link], demand) -> list[int]:
    """Full scan with reachability by boolean matrix-power fixpoint."""
    from itertools import product

    nodes = sorted({n for link in links for n in link.nodes})
    pos = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    need = np.zeros((n, n), dtype=bool)
    for (o, d), trips in demand.items():
        if trips > 0 and o != d:
            need[pos[o], pos[d]] = True

    n_links = len(links)
    codes = []
    orients = (Orientation.TWO_WAY, Orientation.FORWARD, Orientation.BACKWARD)
    for digits in product(orients, repeat=n_links):
        code = sum(int(d) * 3**i for i, d in enumerate(digits))
        reach = np.eye(n, dtype=bool)
        for a, b in orientation_arcs(links, digits):
            reach[pos[a], pos[b]] = True
        while True:
            grown = reach | (reach @ reach)
            if (grown == reach).all():
                break
            reach = grown
        if not (need & ~reach).any():
            codes.append(code)
    return sorted(codes)


def all_shortest_paths(adj: dict[int, list[int]], source: int, target: int,
                       dist: dict[int, float]):
    """Every minimum-hop path source -> target, by layered DFS."""
    import math

    if math.isinf(dist.get(target, math.inf)):
        return []
    paths = []

    def walk(node, path):
        if node == target:
            paths.append(tuple(path))
            return
        for nxt in adj[node]:
            if dist.get(nxt, math.inf) == dist[node] + 1 and dist.get(target, math.inf) >= dist[nxt]:
                walk(nxt, path + [nxt])

    walk(source, [source])
    return [p for p in paths if len(p) - 1 == dist[target]]


def brute_edge_betweenness(dn: DirectedNetwork) -> dict[tuple[int, int], float]:
    """Path-enumeration betweenness, normalized by N(N-1)."""
    import math
    from collections import deque

    n = len(dn.nodes)
    bc = {(a.tail, a.head): 0.0 for a in dn.arcs}
    if n < 2:
        return bc
    adj = dn.adjacency()
    for s in dn.nodes:
        dist = {v: math.inf for v in dn.nodes}
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if math.isinf(dist[v]):
                    dist[v] = dist[u] + 1
                    q.append(v)
        for t in dn.nodes:
            if t == s or math.isinf(dist[t]):
                continue
            paths = all_shortest_paths(adj, s, t, dist)
            sigma = len(paths)
            for path in paths:
                for u, v in zip(path, path[1:]):
                    bc[(u, v)] += 1.0 / (sigma * n * (n - 1))
    return bc


def ols_by_inversion(X, y, alpha: float):
    """Augmented normal equations solved with an explicit inverse."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    Z = np.hstack([np.ones((n, 1)), X])
    A = Z.T @ Z
    penalty = np.zeros_like(A)
    penalty[1:, 1:] = alpha * np.eye(X.shape[1])
    beta = np.linalg.inv(A + penalty) @ (Z.T @ y)
    return float(beta[0]), tuple(float(b) for b in beta[1:])


def random_digraph(rng, max_nodes: int = 7) -> DirectedNetwork:
    """Random directed network with BPR attributes (for oracle comparisons)."""
    from flowdir.netmodel import Arc

    n = rng.randint(2, max_nodes)
    nodes = list(range(1, n + 1))
    arcs = []
    for a in nodes:
        for b in nodes:
            if a != b and rng.random() < 0.45:
                arcs.append(Arc(a, b, capacity=100.0 + rng.random() * 100,
                                free_flow_time=1.0 + rng.random() * 9,
                                bpr_b=0.15, bpr_power=4.0))
    return DirectedNetwork(tuple(nodes), tuple(arcs))
