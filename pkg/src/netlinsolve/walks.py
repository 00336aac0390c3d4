"""Walk combinatorics behind the topology-dependent error bound.

A walk of length ``l`` is a vertex sequence ``(v_0, ..., v_l)`` whose consecutive
pairs are edges (self-loops included). Its *order* is the number of consecutive
sub-walks, each covering every vertex, into which it splits greedily; adjacent
sub-walks share their junction vertex.

The bound on agent ``i`` after ``t + 1`` rounds sums, over all walks ``w`` of
length ``t`` from ``i``, the inverse-degree product of ``w`` times
``(1 - phi)^(n r / 2)`` times the initial errors of the neighbours of the last
vertex. ``r`` is the walk order capped at ``t // n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, TooLarge
from .graphs import Network
from .linalg import LinearSystem, phi as phi_of

MAX_ENUMERATION = 10**8
MAX_DP_VERTICES = 20


@dataclass(frozen=True)
class OrderDecomposition:
    order: int
    cut_positions: tuple[int, ...]
    residual_start: int

    def tail(self, walk):
        """Vertices after the last complete sub-walk (starting at the junction)."""
        return tuple(walk[self.residual_start:])


@dataclass
class BoundReport:
    source: int
    t: int
    phi: float
    bound: float
    bound_by_order: dict[int, float] = field(default_factory=dict)
    mass_by_order: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "t": self.t,
            "phi": self.phi,
            "bound": self.bound,
            "bound_by_order": {str(k): v for k, v in sorted(self.bound_by_order.items())},
            "mass_by_order": {str(k): v for k, v in sorted(self.mass_by_order.items())},
        }


def is_walk(net: Network, walk) -> bool:
    adj = net.adjacency
    return len(walk) >= 1 and all(adj[u, v] for u, v in zip(walk[:-1], walk[1:]))


def walk_order(walk, n: int) -> OrderDecomposition:
    """Greedy minimal-prefix decomposition of ``walk`` over ``n`` vertices.

    Scanning left to right, a sub-walk closes at the first position where every
    vertex has been seen since the previous cut; the cut vertex opens the next
    sub-walk. The tail after the last cut contributes no order.
    """
    if len(walk) == 0:
        raise InvalidParams("a walk has at least one vertex")
    cuts = []
    seen = {walk[0]}
    for k in range(1, len(walk)):
        v = walk[k]
        seen.add(v)
        if len(seen) == n:
            cuts.append(k)
            seen = {v}
    return OrderDecomposition(len(cuts), tuple(cuts), cuts[-1] if cuts else 0)


def f_product(walk, values) -> float:
    """Product of ``values[v]`` over every position of the walk, repeats included."""
    out = 1.0
    for v in walk:
        out *= values[v]
    return out


def _check_enumeration(net: Network, t: int) -> None:
    if t < 0:
        raise InvalidParams(f"walk length must be >= 0, got {t}")
    if net.n**t > MAX_ENUMERATION:
        raise TooLarge(f"n^t = {net.n}^{t} exceeds the enumeration guard {MAX_ENUMERATION:.0e}")


def enumerate_walks(net: Network, i: int, t: int):
    """Yield every walk of length ``t`` from ``i`` once, in lexicographic order."""
    _check_enumeration(net, t)
    nbrs = [net.neighbors(v).tolist() for v in range(net.n)]
    walk = [i]

    def extend(depth):
        if depth == t:
            yield tuple(walk)
            return
        for u in nbrs[walk[-1]]:
            walk.append(u)
            yield from extend(depth + 1)
            walk.pop()

    yield from extend(0)


def product_mass_identity(net: Network, i: int, t: int) -> float:
    """Total inverse-degree mass of all one-step extensions of length-``t`` walks from ``i``.

    Each walk ``w`` of length ``t`` is weighted by ``f(w, 1/d)`` and extended to
    the ``d`` neighbours of its last vertex; the result is exactly 1 in exact
    arithmetic.
    """
    inv_d = 1.0 / net.degrees
    deg = net.degrees
    return math.fsum(f_product(w, inv_d) * deg[w[-1]] for w in enumerate_walks(net, i, t))


def _neighbor_error_mass(net: Network, y0_norms) -> np.ndarray:
    y0 = np.asarray(y0_norms, dtype=float)
    if y0.shape != (net.n,):
        raise InvalidParams(f"expected {net.n} initial error norms, got shape {y0.shape}")
    return net.adjacency @ y0


def _finish(report: BoundReport, per_order_mass, per_order_bound):
    report.mass_by_order = dict(sorted(per_order_mass.items()))
    report.bound_by_order = dict(sorted(per_order_bound.items()))
    report.bound = math.fsum(report.bound_by_order.values())
    return report


def bound_bruteforce(sys: LinearSystem, net: Network, i: int, t: int, y0_norms) -> BoundReport:
    """Evaluate the walk-order bound on ``|y_i(t+1)|`` by enumerating every walk."""
    n = net.n
    ph = phi_of(sys)
    r_cap = t // n
    nbr_err = _neighbor_error_mass(net, y0_norms)
    inv_d = 1.0 / net.degrees
    deg = net.degrees
    mass: dict[int, list] = {}
    bound: dict[int, list] = {}
    for w in enumerate_walks(net, i, t):
        r = min(walk_order(w, n).order, r_cap)
        f = f_product(w, inv_d)
        mass.setdefault(r, []).append(f * deg[w[-1]])
        bound.setdefault(r, []).append(f * (1.0 - ph) ** (n * r / 2) * nbr_err[w[-1]])
    report = BoundReport(source=i, t=t, phi=ph, bound=0.0)
    return _finish(
        report,
        {r: math.fsum(v) for r, v in mass.items()},
        {r: math.fsum(v) for r, v in bound.items()},
    )


def bound_dp(sys: LinearSystem, net: Network, i: int, t: int, y0_norms) -> BoundReport:
    """Same bound as :func:`bound_bruteforce`, by dynamic programming.

    State: (current vertex, vertices seen since the last cut as a bitmask, order
    so far capped at ``t // n``). Once the cap is reached the mask no longer
    matters and is dropped.
    """
    n = net.n
    if n > MAX_DP_VERTICES:
        raise TooLarge(f"bitmask DP needs n <= {MAX_DP_VERTICES}, got {n}")
    if t < 0:
        raise InvalidParams(f"walk length must be >= 0, got {t}")
    ph = phi_of(sys)
    r_cap = t // n
    full = (1 << n) - 1
    nbr_err = _neighbor_error_mass(net, y0_norms)
    inv_d = 1.0 / net.degrees
    deg = net.degrees
    nbrs = [net.neighbors(v).tolist() for v in range(n)]

    states = {(i, 1 << i if r_cap > 0 else 0, 0): inv_d[i]}
    for _ in range(t):
        nxt: dict = {}
        for (v, mask, r), f in states.items():
            for u in nbrs[v]:
                if r == r_cap:
                    key = (u, 0, r)
                else:
                    m2 = mask | (1 << u)
                    if m2 == full:
                        r2 = r + 1
                        key = (u, 0 if r2 == r_cap else 1 << u, r2)
                    else:
                        key = (u, m2, r)
                nxt[key] = nxt.get(key, 0.0) + f * inv_d[u]
        states = nxt

    mass: dict[int, list] = {}
    bound: dict[int, list] = {}
    for (v, _mask, r), f in states.items():
        mass.setdefault(r, []).append(f * deg[v])
        bound.setdefault(r, []).append(f * (1.0 - ph) ** (n * r / 2) * nbr_err[v])
    report = BoundReport(source=i, t=t, phi=ph, bound=0.0)
    return _finish(
        report,
        {r: math.fsum(v) for r, v in mass.items()},
        {r: math.fsum(v) for r, v in bound.items()},
    )


def uncovered_mass(net: Network, i: int, t: int) -> float:
    """Inverse-degree mass (with neighbour extension) of length-``t`` walks from ``i`` that miss a vertex."""
    n = net.n
    full = (1 << n) - 1
    inv_d = 1.0 / net.degrees
    nbrs = [net.neighbors(v).tolist() for v in range(n)]
    states = {(i, 1 << i): inv_d[i]}
    for _ in range(t):
        nxt: dict = {}
        for (v, mask), f in states.items():
            for u in nbrs[v]:
                m2 = mask | (1 << u)
                if m2 != full:
                    nxt[(u, m2)] = nxt.get((u, m2), 0.0) + f * inv_d[u]
        states = nxt
    deg = net.degrees
    return math.fsum(f * deg[v] for (v, mask), f in states.items() if mask != full)


# -- complete-graph counting -------------------------------------------------

def _c0(n: int, t: int) -> int:
    return sum(math.comb(n, k) * k**t for k in range(1, n)) - (n - 1) ** t


def complete_graph_counts(n: int, t: int, r: int) -> int:
    """Upper bound on the number of order-``r`` walks of length ``t`` from a fixed vertex of ``K_n``.

    ``r = 0``: ``sum_{k=1}^{n-1} C(n,k) k^t - (n-1)^t``. ``r >= 1``: each of the
    ``r`` covering blocks picks ``n`` ordered positions out of at most ``t``,
    times the ``r = 0`` count of the remaining ``t - r n`` steps, i.e.
    ``P(t, n)^r * c0(t - r n)``. Exact integers throughout.
    """
    if n < 1 or t < 0 or r < 0:
        raise InvalidParams(f"need n >= 1, t >= 0, r >= 0; got n={n}, t={t}, r={r}")
    if r >= 1 and r * n > t:
        raise InvalidParams(f"order {r} needs t >= r*n = {r * n}, got t={t}")
    if r == 0:
        return _c0(n, t)
    return math.perm(t, n) ** r * _c0(n, t - r * n)


def count_walks_by_order(net: Network, i: int, t: int) -> dict[int, int]:
    """Exact number of length-``t`` walks from ``i`` per (uncapped) greedy order."""
    counts: dict[int, int] = {}
    for w in enumerate_walks(net, i, t):
        r = walk_order(w, net.n).order
        counts[r] = counts.get(r, 0) + 1
    return dict(sorted(counts.items()))

