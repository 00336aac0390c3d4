"""Square linear systems, per-row orthogonal projectors and scalar conditioning data.

Each agent of the network owns exactly one row ``A[i]`` and one entry ``b[i]``.
Everything here is dense and immutable once built.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, SingularMatrix

# reject when sigma_min / sigma_max falls below this
RANK_TOL = 1e-12


@dataclass(frozen=True)
class RowProjector:
    """Orthogonal projector onto the kernel of a single row, ``I - a a^T / |a|^2``."""

    P: np.ndarray
    row_index: int


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """A full-rank square system ``A x = b`` with cached solution and norms.

    Build instances with :func:`build_system`; the constructor does not validate.
    """

    A: np.ndarray
    b: np.ndarray
    x_star: np.ndarray
    row_norms: np.ndarray
    singular_values: np.ndarray
    _projectors: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def tau(self) -> float:
        """Largest row norm."""
        return float(self.row_norms.max())

    @property
    def inv_norm(self) -> float:
        """Spectral norm of ``A^{-1}``, i.e. ``1 / sigma_min``."""
        return float(1.0 / self.singular_values[-1])

    @property
    def norm(self) -> float:
        return float(self.singular_values[0])

    def projector(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"row index {i} outside [0, {self.n})")
        P = self._projectors.get(i)
        if P is None:
            a = self.A[i]
            P = np.eye(self.n) - np.outer(a, a) / (a @ a)
            P.setflags(write=False)
            self._projectors[i] = P
        return P


def build_system(A, b) -> LinearSystem:
    """Validate ``(A, b)`` and cache the solution, row norms and singular values.

    Raises
    ------
    DimensionMismatch
        If ``A`` is not square or ``b`` has the wrong length.
    SingularMatrix
        If ``sigma_min / sigma_max < 1e-12``.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"b has length {b.shape[0]}, expected {A.shape[0]}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise DimensionMismatch("A and b must be finite")

    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < RANK_TOL:
        raise SingularMatrix(f"A is rank deficient (condition estimate {_cond(sv):.3g})")
    x_star = np.linalg.solve(A, b)
    for arr in (A, b, x_star, sv):
        arr.setflags(write=False)
    row_norms = np.linalg.norm(A, axis=1)
    row_norms.setflags(write=False)
    return LinearSystem(A=A, b=b, x_star=x_star, row_norms=row_norms, singular_values=sv)


def _cond(sv):
    return np.inf if sv[-1] == 0 else sv[0] / sv[-1]


def row_projector(sys: LinearSystem, i: int) -> RowProjector:
    return RowProjector(P=sys.projector(i), row_index=i)


def phi(sys: LinearSystem) -> float:
    """Per-coverage contraction ingredient ``1 / (sqrt(n) * tau * |A^{-1}|)^2``."""
    return 1.0 / (np.sqrt(sys.n) * sys.tau * sys.inv_norm) ** 2


def condition_numbers(sys: LinearSystem) -> tuple[float, float]:
    """Return ``(kappa, kappa_scaled)`` = ``(|A| |A^{-1}|, |A|_F |A^{-1}|)``."""
    kappa = sys.norm * sys.inv_norm
    kappa_s = float(np.sqrt(np.sum(sys.singular_values**2))) * sys.inv_norm
    return kappa, kappa_s


def normalized_row_energy(sys: LinearSystem, x) -> float:
    """``sum_i <A_i / |A_i|, x>^2``; bounded below by ``|x|^2 / (tau |A^{-1}|)^2``."""
    x = np.asarray(x, dtype=float)
    return float(np.sum((sys.A @ x / sys.row_norms) ** 2))


# -- CSV io ------------------------------------------------------------------

def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise DimensionMismatch(f"{path}: empty matrix file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionMismatch(f"{path}: ragged rows")
    return np.array(rows, dtype=float)


def read_vector_csv(path) -> np.ndarray:
    m = read_matrix_csv(path)
    if m.shape[1] != 1:
        raise DimensionMismatch(f"{path}: expected a single column, got {m.shape[1]}")
    return m[:, 0].copy()


def write_matrix_csv(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in M:
            w.writerow([repr(float(v)) for v in row])


def write_vector_csv(path, v) -> None:
    write_matrix_csv(path, np.asarray(v, dtype=float).reshape(-1, 1))


def load_system(matrix_path, rhs_path) -> LinearSystem:
    return build_system(read_matrix_csv(matrix_path), read_vector_csv(rhs_path))
