"""Undirected networks with mandatory self-loops, plus the four random families.

Conventions: vertices are ``0..n-1`` in memory and ``1..n`` on disk. Every vertex
carries a self-loop, so ``degree[i] = sum_j adjacency[i, j]`` counts the loop once.
Distances ignore the loops.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from .errors import Disconnected, GenerationFailed, InvalidParams

MAX_ATTEMPTS = 100


@dataclass(frozen=True, eq=False)
class Network:
    adjacency: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def neighbors(self, i: int) -> np.ndarray:
        """Neighbours of ``i`` in increasing order, ``i`` itself included."""
        return np.flatnonzero(self.adjacency[i])

    def edges(self) -> list[tuple[int, int]]:
        """Undirected non-loop edges as ``(u, v)`` with ``u < v``."""
        iu, ju = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    @property
    def edge_count(self) -> int:
        return int(np.triu(self.adjacency, k=1).sum())


def make_network(adjacency, check_connected: bool = True) -> Network:
    """Build a network from a symmetric 0/1 matrix; the diagonal is forced to 1."""
    adj = np.array(adjacency, dtype=np.int64)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
        raise InvalidParams(f"adjacency must be a non-empty square matrix, got {adj.shape}")
    if not np.isin(adj, (0, 1)).all():
        raise InvalidParams("adjacency entries must be 0 or 1")
    if not np.array_equal(adj, adj.T):
        raise InvalidParams("adjacency must be symmetric")
    np.fill_diagonal(adj, 1)
    if check_connected and not is_connected(adj):
        raise Disconnected("network is not connected")
    adj.setflags(write=False)
    return Network(adj)


def from_edges(n: int, edges, check_connected: bool = True) -> Network:
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidParams(f"edge ({u}, {v}) outside vertex range [0, {n})")
        adj[u, v] = adj[v, u] = 1
    return make_network(adj, check_connected=check_connected)


def is_connected(adjacency) -> bool:
    adj = np.asarray(adjacency)
    if adj.shape[0] <= 1:
        return True
    ncomp, _ = csgraph.connected_components(adj, directed=False)
    return ncomp == 1


# -- deterministic shapes ------------------------------------------------------

def complete_graph(n: int) -> Network:
    return make_network(np.ones((n, n), dtype=np.int64))


def path_graph(n: int) -> Network:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Network:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Network:
    """Vertex 0 is the hub."""
    return from_edges(n, [(0, i) for i in range(1, n)])


# -- random families ------------------------------------------------------------

def _retry(build, seed, what):
    # regenerate with an incremented seed until connected
    for attempt in range(MAX_ATTEMPTS):
        adj = build(np.random.default_rng(seed + attempt))
        if adj is not None and is_connected(adj):
            return make_network(adj, check_connected=False)
    raise GenerationFailed(f"{what}: no connected sample after {MAX_ATTEMPTS} attempts")


def gen_er(n: int, p: float, seed: int) -> Network:
    """Erdos-Renyi G(n, p), conditioned on connectivity."""
    if n < 2:
        raise InvalidParams(f"ER needs n >= 2, got {n}")
    if not 0.0 < p <= 1.0:
        raise InvalidParams(f"ER probability must lie in (0, 1], got {p}")

    def build(rng):
        upper = np.triu(rng.random((n, n)) < p, k=1)
        return (upper | upper.T).astype(np.int64)

    return _retry(build, seed, f"ER(n={n}, p={p})")


def gen_ws(n: int, k: int, p: float, seed: int) -> Network:
    """Watts-Strogatz ring lattice with ``k`` nearest neighbours and rewiring ``p``.

    Each lattice edge ``(u, u+j)`` is visited once and, with probability ``p``,
    its far end is moved to a uniformly chosen vertex that is neither ``u`` nor
    already adjacent to it. Rewiring keeps the edge count at ``n k / 2``.
    """
    if k % 2 or k < 2 or k >= n:
        raise InvalidParams(f"WS lattice degree must be even with 2 <= k < n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"WS rewiring probability must lie in [0, 1], got {p}")

    def build(rng):
        adj = np.zeros((n, n), dtype=np.int64)
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                adj[u, v] = adj[v, u] = 1
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                if not adj[u, v] or rng.random() >= p:
                    continue
                free = np.flatnonzero(adj[u] == 0)
                free = free[free != u]
                if free.size == 0:
                    continue
                w = int(rng.choice(free))
                adj[u, v] = adj[v, u] = 0
                adj[u, w] = adj[w, u] = 1
        return adj

    return _retry(build, seed, f"WS(n={n}, k={k}, p={p})")


def gen_sf(n: int, m: int, seed: int) -> Network:
    """Preferential attachment grown from an ``m``-vertex clique.

    Each arriving vertex links to ``m`` distinct existing vertices chosen with
    probability proportional to their current (loop-free) degree.
    """
    if not 1 <= m < n:
        raise InvalidParams(f"SF needs 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=np.int64)
    adj[:m, :m] = 1
    np.fill_diagonal(adj, 0)
    deg = adj.sum(axis=1).astype(float)
    for v in range(m, n):
        weights = deg[:v]
        probs = None if weights.sum() == 0 else weights / weights.sum()
        targets = rng.choice(v, size=m, replace=False, p=probs)
        adj[v, targets] = adj[targets, v] = 1
        deg[targets] += 1
        deg[v] = m
    return make_network(adj)


def gen_rr(n: int, k: int, seed: int) -> Network:
    """Random ``k``-regular graph by stub pairing, resampled until simple and connected.

    Stubs are paired in random order; pairs that would create a loop or a repeated
    edge are returned to the pool and reshuffled. A sample whose leftover stubs can
    no longer be paired is discarded.
    """
    if k < 1 or k >= n or (n * k) % 2:
        raise InvalidParams(f"RR needs 1 <= k < n and n*k even, got n={n}, k={k}")

    def build(rng):
        adj = np.zeros((n, n), dtype=np.int64)
        stubs = np.repeat(np.arange(n), k)
        while stubs.size:
            rng.shuffle(stubs)
            leftover = []
            for u, v in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
                if u == v or adj[u, v]:
                    leftover.extend((u, v))
                else:
                    adj[u, v] = adj[v, u] = 1
            if len(leftover) == stubs.size:
                if not _pairable(leftover, adj):
                    return None
            stubs = np.array(leftover, dtype=np.int64)
        return adj

    return _retry(build, seed, f"RR(n={n}, k={k})")


def _pairable(stubs, adj) -> bool:
    counts = Counter(stubs)
    verts = list(counts)
    return any(
        u != v and not adj[u, v] for i, u in enumerate(verts) for v in verts[i + 1:]
    )


# -- inspection --------------------------------------------------------------

def distances(net: Network) -> np.ndarray:
    return csgraph.shortest_path(net.adjacency, method="D", directed=False, unweighted=True)


def diameter(net: Network) -> int:
    """Longest shortest-path length over all vertex pairs; loops ignored."""
    dist = distances(net)
    if not np.all(np.isfinite(dist)):
        raise Disconnected("diameter is undefined for a disconnected network")
    return int(dist.max())


def degree_stats(net: Network) -> tuple[float, float, dict[int, int]]:
    """Mean, population variance and histogram of the degrees (loop counted once)."""
    d = net.degrees
    hist = dict(sorted(Counter(d.tolist()).items()))
    return float(d.mean()), float(d.var()), hist


# -- edge-list io ------------------------------------------------------------

def write_edgelist(path, net: Network) -> None:
    with open(path, "w") as fh:
        fh.write(f"n={net.n}\n")
        for u, v in net.edges():
            fh.write(f"{u + 1} {v + 1}\n")


def read_edgelist(path) -> Network:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise InvalidParams(f"{path}: first line must be 'n=<count>'")
    n = int(lines[0][2:])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InvalidParams(f"{path}: malformed edge line {ln!r}")
        u, v = int(parts[0]) - 1, int(parts[1]) - 1
        if u != v:
            edges.append((u, v))
    return from_edges(n, edges)
