"""Projection consensus: each agent averages its neighbours and projects back onto its row.

Agent ``i`` holds ``x_i`` with ``A_i x_i = b_i`` and updates synchronously

    x_i <- x_i - (1/d_i) P_i (d_i x_i - sum_{j in N_i} x_j)

where ``N_i`` includes ``i`` itself. The errors ``y_i = x_i - x*`` then evolve
linearly, ``y(t) = M^t y(0)``, with the block updating matrix
``M = P_diag [(D^{-1} A^T) kron I] P_diag``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateInitial, DimensionMismatch, InvalidParams, TooLarge
from .graphs import Network
from .linalg import LinearSystem

# n^4 entries beyond this
MAX_DENSE_N = 64


@dataclass(frozen=True, eq=False)
class AgentEnsemble:
    """Local solutions, one row per agent (``states[i] = x_i(t)``)."""

    system: LinearSystem
    network: Network
    states: np.ndarray
    t: int = 0

    @property
    def errors(self) -> np.ndarray:
        """Per-agent error vectors ``y_i(t) = x_i(t) - x*`` stacked as rows."""
        return self.states - self.system.x_star

    @property
    def error_norms(self) -> np.ndarray:
        return np.linalg.norm(self.errors, axis=1)


@dataclass(frozen=True)
class UpdatingMatrix:
    M: np.ndarray
    n: int

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.n
        return self.M[i * n:(i + 1) * n, j * n:(j + 1) * n]


@dataclass
class ConvergenceTrace:
    """Checkpointed per-agent errors and the relative error ``R(t)``."""

    t: list[int] = field(default_factory=list)
    eps: list[np.ndarray] = field(default_factory=list)
    R: list[float] = field(default_factory=list)

    def record(self, t: int, eps: np.ndarray, eps0_sum: float) -> None:
        self.t.append(t)
        self.eps.append(eps)
        self.R.append(float(eps.sum() / eps0_sum))

    def write_csv(self, path) -> None:
        n = len(self.eps[0]) if self.eps else 0
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", *(f"eps_{i + 1}" for i in range(n)), "R"])
            for t, eps, r in zip(self.t, self.eps, self.R):
                w.writerow([t, *(format(float(e), ".17g") for e in eps), format(r, ".17g")])


def _check_dims(sys: LinearSystem, net: Network) -> None:
    if sys.n != net.n:
        raise DimensionMismatch(f"system has {sys.n} rows but network has {net.n} agents")


def _project_rows(sys: LinearSystem, V: np.ndarray) -> np.ndarray:
    """Apply ``P_i`` to row ``i`` of ``V`` for every ``i`` at once."""
    A = sys.A
    coef = np.einsum("ij,ij->i", V, A) / sys.row_norms**2
    return V - coef[:, None] * A


def init_states(sys: LinearSystem, net: Network, radius: float, seed) -> AgentEnsemble:
    """Start each agent at ``x* + P_i r_i`` with ``r_i`` uniform on the sphere of ``radius``.

    Every start satisfies its own row exactly (up to rounding) and lies within
    ``radius`` of the true solution.
    """
    _check_dims(sys, net)
    if radius < 0:
        raise InvalidParams(f"radius must be non-negative, got {radius}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((sys.n, sys.n))
    r = radius * g / np.linalg.norm(g, axis=1)[:, None]
    states = sys.x_star + _project_rows(sys, r)
    return AgentEnsemble(sys, net, states, 0)


def step(ens: AgentEnsemble) -> AgentEnsemble:
    """One synchronous round for all agents."""
    sys, net = ens.system, ens.network
    X = ens.states
    d = net.degrees.astype(float)
    neighbor_sum = net.adjacency @ X
    correction = _project_rows(sys, d[:, None] * X - neighbor_sum)
    return replace(ens, states=X - correction / d[:, None], t=ens.t + 1)


def build_updating_matrix(sys: LinearSystem, net: Network) -> UpdatingMatrix:
    _check_dims(sys, net)
    n = sys.n
    if n > MAX_DENSE_N:
        raise TooLarge(f"dense updating matrix needs n <= {MAX_DENSE_N}, got {n}")
    P_diag = np.zeros((n * n, n * n))
    for i in range(n):
        P_diag[i * n:(i + 1) * n, i * n:(i + 1) * n] = sys.projector(i)
    D_inv = np.diag(1.0 / net.degrees)
    mixing = np.kron(D_inv @ net.adjacency.T, np.eye(n))
    return UpdatingMatrix(P_diag @ mixing @ P_diag, n)


def mixed_norm(sys: LinearSystem, net: Network, t: int = 1) -> float:
    """Max row sum of the block spectral norms of ``M^t``."""
    if t < 1:
        raise InvalidParams(f"power must be >= 1, got {t}")
    um = build_updating_matrix(sys, net)
    Mt = UpdatingMatrix(np.linalg.matrix_power(um.M, t), um.n)
    n = um.n
    Q = np.array([[np.linalg.norm(Mt.block(i, j), 2) for j in range(n)] for i in range(n)])
    return float(Q.sum(axis=1).max())


def run(
    sys: LinearSystem,
    net: Network,
    t_max: int,
    checkpoint_stride: int = 10,
    radius: float = 1.0,
    seed=0,
    checkpoints=None,
) -> ConvergenceTrace:
    """Iterate from :func:`init_states` and record errors at checkpoints.

    Checkpoints are every ``checkpoint_stride`` steps plus ``t_max``, unless an
    explicit iterable ``checkpoints`` is given. ``t = 0`` is always recorded.
    """
    if t_max < 0:
        raise InvalidParams(f"t_max must be >= 0, got {t_max}")
    if checkpoints is None:
        if checkpoint_stride < 1:
            raise InvalidParams(f"checkpoint stride must be >= 1, got {checkpoint_stride}")
        marks = set(range(0, t_max + 1, checkpoint_stride)) | {t_max}
    else:
        marks = {int(c) for c in checkpoints if 0 <= int(c) <= t_max} | {0}

    ens = init_states(sys, net, radius, seed)
    eps = ens.error_norms
    eps0 = float(eps.sum())
    if eps0 == 0.0:
        raise DegenerateInitial("initial errors are all zero; relative error is 0/0")
    trace = ConvergenceTrace()
    trace.record(0, eps, eps0)
    for t in range(1, t_max + 1):
        ens = step(ens)
        if t in marks:
            trace.record(t, ens.error_norms, eps0)
    return trace
