"""Single-row projection sequences and their error envelopes.

A schedule is a sequence of row indices; applying row ``j`` moves ``z`` onto the
hyperplane ``A_j z = b_j``. A schedule is treated as a walk on the complete graph
over rows, so its order (number of greedy all-row sweeps) comes from
:func:`netlinsolve.walks.walk_order`. Over a schedule of order ``r`` the error
shrinks at least by ``(1 - phi)^(n r / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundViolated, IndexOutOfRange, InvalidParams
from .linalg import LinearSystem, condition_numbers, phi
from .walks import walk_order

# relative slack for floating-point rounding in envelope checks
REL_TOL = 1e-12


def kaczmarz_step(sys: LinearSystem, z, j: int) -> np.ndarray:
    """Project ``z`` onto the hyperplane of row ``j``."""
    if not 0 <= j < sys.n:
        raise IndexOutOfRange(f"row index {j} outside [0, {sys.n})")
    a = sys.A[j]
    z = np.asarray(z, dtype=float)
    return z + (sys.b[j] - a @ z) / sys.row_norms[j] ** 2 * a


def run_schedule(sys: LinearSystem, z0, schedule) -> tuple[np.ndarray, np.ndarray]:
    """Apply the rows of ``schedule`` in order.

    Returns the final iterate and ``|z(k) - x*|`` for ``k = 0..len(schedule)``.
    """
    schedule = list(schedule)
    if not schedule:
        raise InvalidParams("schedule must be non-empty")
    z = np.asarray(z0, dtype=float)
    errs = [np.linalg.norm(z - sys.x_star)]
    for j in schedule:
        z = kaczmarz_step(sys, z, j)
        errs.append(np.linalg.norm(z - sys.x_star))
    return z, np.array(errs)


def sweep_contraction_bounds(sys: LinearSystem, r: int) -> tuple[float, float]:
    """Envelope for ``r`` complete sweeps: ``(tight, loose)``.

    ``tight = (1 - phi)^(n r / 2)`` and ``loose = (1 - kappa^-2)^(n r / 2)``.
    Because ``|A| <= |A|_F <= sqrt(n) tau`` we always have ``phi <= kappa^-2``, so
    ``loose <= tight``: the condition-number form is the smaller number and is
    not a valid envelope in general. Only ``tight`` is enforced by
    :func:`verify_sequence_bounds`.
    """
    if r < 1:
        raise InvalidParams(f"order must be >= 1, got {r}")
    n = sys.n
    kappa, _ = condition_numbers(sys)
    tight = (1.0 - phi(sys)) ** (n * r / 2)
    loose = max(0.0, 1.0 - kappa**-2) ** (n * r / 2)
    return tight, loose


@dataclass
class SequenceReport:
    order: int
    errors: np.ndarray
    tight: float | None
    loose: float | None

    @property
    def loose_holds(self) -> bool | None:
        """Whether the condition-number envelope happened to hold; it is not guaranteed."""
        if self.loose is None:
            return None
        return self.final_error <= self.loose * self.initial_error * (1 + REL_TOL)

    @property
    def initial_error(self) -> float:
        return float(self.errors[0])

    @property
    def final_error(self) -> float:
        return float(self.errors[-1])


def verify_sequence_bounds(sys: LinearSystem, schedule, z0=None, seed=None) -> SequenceReport:
    """Run ``schedule`` and check non-expansiveness and the order-``r`` ``tight`` envelope.

    ``z0`` defaults to a seeded Gaussian perturbation of the solution.

    Raises
    ------
    BoundViolated
        With the offending schedule, start and errors; never expected on valid input.
    """
    schedule = [int(j) for j in schedule]
    if z0 is None:
        rng = np.random.default_rng(seed)
        z0 = sys.x_star + rng.standard_normal(sys.n)
    _, errs = run_schedule(sys, z0, schedule)
    r = walk_order(schedule, sys.n).order
    ctx = {"schedule": schedule, "z0": np.asarray(z0, dtype=float), "errors": errs, "order": r}

    grow = np.flatnonzero(errs[1:] > errs[:-1] * (1 + REL_TOL))
    if grow.size:
        raise BoundViolated(f"error increased at step {int(grow[0]) + 1}", ctx)

    tight = loose = None
    if r >= 1:
        tight, loose = sweep_contraction_bounds(sys, r)
        e0, et = errs[0], errs[-1]
        if et > tight * e0 * (1 + REL_TOL):
            raise BoundViolated(f"final error {et:.6g} exceeds {tight:.6g} * {e0:.6g} at order {r}", ctx)
    return SequenceReport(order=r, errors=errs, tight=tight, loose=loose)


def cyclic_schedule(n: int, sweeps: int) -> list[int]:
    return list(range(n)) * sweeps


def random_schedule(n: int, length: int, rng) -> list[int]:
    return np.random.default_rng(rng).integers(0, n, size=length).tolist()


def read_schedule(path) -> list[int]:
    """Whitespace/comma separated 1-based row indices."""
    with open(path) as fh:
        tokens = fh.read().replace(",", " ").split()
    return [int(tok) - 1 for tok in tokens]
