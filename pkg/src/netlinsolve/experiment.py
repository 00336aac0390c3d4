"""Topology-versus-convergence experiments with box-whisker summaries of R(t).

For every (group, trial) a graph is drawn from the group's family, a random
system and initial states are drawn per trial, the consensus iteration runs to
``t_max``, and the relative errors at the checkpoints are summarised per group.

Seeds are derived from ``(master_seed, group, trial, purpose)``. The system and
the initial states depend on the trial only, so every group sees the same
equations (common random numbers); the graph depends on group and trial.
"""

from __future__ import annotations

import csv
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import graphs
from .consensus import run
from .errors import ConfigError, EmptyInput, GenerationFailed, NetLinSolveError
from .linalg import LinearSystem, build_system

FAMILIES = ("er", "ws", "sf", "rr")
MAX_SYSTEM_RESAMPLES = 1000
PLACEHOLDER_MEAN_DEGREES = (4, 8, 12)


@dataclass
class SystemSpec:
    low: float = -1.0
    high: float = 1.0
    cond_cap: float = 1e4


@dataclass
class GroupSpec:
    family: str
    params: dict
    label: str = ""

    def __post_init__(self):
        if not self.label:
            self.label = f"{self.family}({format_params(self.params)})"


@dataclass
class ExperimentConfig:
    n: int = 30
    groups: list[GroupSpec] = field(default_factory=list)
    trials: int = 30
    system: SystemSpec = field(default_factory=SystemSpec)
    t_max: int = 500
    checkpoints: list[int] | None = None
    radius: float = 1.0
    master_seed: int = 0
    workers: int = 1

    @property
    def checkpoint_list(self) -> list[int]:
        if self.checkpoints is None:
            return sorted(set(range(0, self.t_max + 1, 10)) | {self.t_max})
        return sorted(set(int(c) for c in self.checkpoints) | {0})

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.t_max < 0:
            raise ConfigError(f"t_max must be >= 0, got {self.t_max}")
        if any(c < 0 or c > self.t_max for c in self.checkpoint_list):
            raise ConfigError(f"checkpoints must lie in [0, {self.t_max}]")
        if not self.system.cond_cap > 1:
            raise ConfigError(f"condition cap must exceed 1, got {self.system.cond_cap}")
        if not self.system.low < self.system.high:
            raise ConfigError("system entry range must satisfy low < high")
        if self.radius <= 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if not self.groups:
            raise ConfigError("at least one group is required")
        for gi, g in enumerate(self.groups):
            _validate_group(self.n, gi, g)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checkpoints"] = self.checkpoint_list
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"n", "groups", "trials", "system", "t_max", "checkpoints", "radius", "master_seed", "workers"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            groups = [GroupSpec(g["family"], dict(g.get("params", {})), g.get("label", "")) for g in d.get("groups", [])]
            cfg = cls(
                n=int(d.get("n", 30)),
                groups=groups,
                trials=int(d.get("trials", 30)),
                system=SystemSpec(**d.get("system", {})),
                t_max=int(d.get("t_max", 500)),
                checkpoints=d.get("checkpoints"),
                radius=float(d.get("radius", 1.0)),
                master_seed=int(d.get("master_seed", 0)),
                workers=int(d.get("workers", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        cfg.validate()
        return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data)


def format_params(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in sorted(params))


def _validate_group(n: int, gi: int, g: GroupSpec) -> None:
    where = f"group {gi} ({g.label})"
    p = g.params
    try:
        if g.family == "er":
            if ("p" in p) == ("k" in p):
                raise ConfigError(f"{where}: ER needs exactly one of 'p' or 'k'")
            prob = float(p["p"]) if "p" in p else float(p["k"]) / (n - 1)
            if not 0 < prob <= 1:
                raise ConfigError(f"{where}: ER probability {prob} outside (0, 1]")
        elif g.family == "ws":
            k, beta = int(p["k"]), float(p["p"])
            if k % 2 or k < 2 or k >= n:
                raise ConfigError(f"{where}: WS needs even 2 <= k < n, got k={k}")
            if not 0 <= beta <= 1:
                raise ConfigError(f"{where}: WS rewiring probability {beta} outside [0, 1]")
        elif g.family == "sf":
            m = int(p["m"])
            if not 1 <= m < n:
                raise ConfigError(f"{where}: SF needs 1 <= m < n, got m={m}")
        elif g.family == "rr":
            k = int(p["k"])
            if not 1 <= k < n:
                raise ConfigError(f"{where}: RR needs 1 <= k < n, got k={k}")
            if (n * k) % 2:
                raise ConfigError(f"{where}: RR needs n*k even, got n={n}, k={k}")
        else:
            raise ConfigError(f"{where}: unknown family {g.family!r}; expected one of {FAMILIES}")
    except KeyError as exc:
        raise ConfigError(f"{where}: missing parameter {exc}") from exc


def make_graph(n: int, g: GroupSpec, seed: int) -> graphs.Network:
    p = g.params
    if g.family == "er":
        prob = float(p["p"]) if "p" in p else float(p["k"]) / (n - 1)
        return graphs.gen_er(n, prob, seed)
    if g.family == "ws":
        return graphs.gen_ws(n, int(p["k"]), float(p["p"]), seed)
    if g.family == "sf":
        return graphs.gen_sf(n, int(p["m"]), seed)
    if g.family == "rr":
        return graphs.gen_rr(n, int(p["k"]), seed)
    raise ConfigError(f"unknown family {g.family!r}")


# -- seeding -----------------------------------------------------------------

def derive_seed(master_seed: int, group: int | None, trial: int, tag: str) -> int:
    """Child seed from ``(master, group, trial, tag)``; ``group=None`` marks streams shared by all groups."""
    gcode = 0 if group is None else group + 1
    ss = np.random.SeedSequence([master_seed, gcode, trial, zlib.crc32(tag.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


# -- systems -------------------------------------------------------------------

def gen_random_system(n: int, spec: SystemSpec, seed) -> LinearSystem:
    """Uniform entries on ``[low, high]``, resampled until ``cond(A) <= cond_cap``.

    The solution is drawn uniformly from the same interval and ``b = A x*``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(MAX_SYSTEM_RESAMPLES):
        A = rng.uniform(spec.low, spec.high, size=(n, n))
        if np.linalg.cond(A) <= spec.cond_cap:
            x = rng.uniform(spec.low, spec.high, size=n)
            return build_system(A, A @ x)
    raise GenerationFailed(
        f"no {n}x{n} system with condition number <= {spec.cond_cap:g} in {MAX_SYSTEM_RESAMPLES} samples"
    )


# -- statistics ----------------------------------------------------------------

@dataclass(frozen=True)
class QuantileRow:
    group: str
    family: str
    params: str
    t: int
    min: float
    q1: float
    median: float
    q3: float
    max: float


def quantiles(samples) -> tuple[float, float, float, float, float]:
    """``(min, q1, median, q3, max)`` with linearly interpolated quartiles."""
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size == 0:
        raise EmptyInput("quantiles of an empty sample")
    q = np.quantile(x, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return tuple(float(v) for v in q)


# -- running -------------------------------------------------------------------

@dataclass
class GroupResult:
    spec: GroupSpec
    R: np.ndarray  # trials x checkpoints
    mean_degree: float  # loops included
    mean_degree_no_loops: float
    mean_diameter: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    groups: list[GroupResult]
    rows: list[QuantileRow]

    def median_at(self, group: int, t: int) -> float:
        col = self.config.checkpoint_list.index(t)
        return float(np.median(self.groups[group].R[:, col]))

    def metadata(self) -> dict:
        return {
            "whiskers": "min/max (no points discarded)",
            "quartiles": "linear interpolation (inclusive)",
            "relative_error": "R(t) = sum_i |x_i(t) - x*| / sum_i |x_i(0) - x*|",
            "initial_state": f"x_i(0) = x* + P_i r_i, |r_i| = {self.config.radius}",
            "degree_convention": "mean_degree counts each self-loop once; mean_degree_no_loops excludes it",
            "placeholder_mean_degrees": list(PLACEHOLDER_MEAN_DEGREES),
            "config": self.config.to_dict(),
            "groups": [
                {
                    "label": g.spec.label,
                    "family": g.spec.family,
                    "params": g.spec.params,
                    "mean_degree": g.mean_degree,
                    "mean_degree_no_loops": g.mean_degree_no_loops,
                    "mean_diameter": g.mean_diameter,
                }
                for g in self.groups
            ],
        }


def _run_trial(cfg: ExperimentConfig, gi: int, trial: int):
    g = cfg.groups[gi]
    try:
        net = make_graph(cfg.n, g, derive_seed(cfg.master_seed, gi, trial, "graph"))
        sys = gen_random_system(cfg.n, cfg.system, derive_seed(cfg.master_seed, None, trial, "system"))
        marks = cfg.checkpoint_list
        trace = run(
            sys,
            net,
            cfg.t_max,
            radius=cfg.radius,
            seed=derive_seed(cfg.master_seed, None, trial, "init"),
            checkpoints=marks,
        )
    except NetLinSolveError as exc:
        raise type(exc)(f"group {gi} ({g.label}), trial {trial}: {exc}") from exc
    return np.array(trace.R), float(net.degrees.mean()), float(graphs.diameter(net))


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    jobs = [(gi, tr) for gi in range(len(cfg.groups)) for tr in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outs = list(pool.map(_run_trial, [cfg] * len(jobs), *zip(*jobs)))
    else:
        outs = [_run_trial(cfg, gi, tr) for gi, tr in jobs]

    marks = cfg.checkpoint_list
    results, rows = [], []
    for gi, g in enumerate(cfg.groups):
        chunk = outs[gi * cfg.trials:(gi + 1) * cfg.trials]
        R = np.vstack([c[0] for c in chunk])
        mean_deg = float(np.mean([c[1] for c in chunk]))
        results.append(GroupResult(g, R, mean_deg, mean_deg - 1.0, float(np.mean([c[2] for c in chunk]))))
        for ci, t in enumerate(marks):
            rows.append(QuantileRow(g.label, g.family, format_params(g.params), t, *quantiles(R[:, ci])))
    return ExperimentResult(cfg, results, rows)


CSV_HEADER = ("group", "family", "params", "t", "min", "q1", "median", "q3", "max")


def write_results_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([
                r.group, r.family, r.params, r.t,
                *(format(v, ".17g") for v in (r.min, r.q1, r.median, r.q3, r.max)),
            ])


def write_metadata(path, result: ExperimentResult) -> None:
    with open(path, "w") as fh:
        json.dump(result.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- presets -------------------------------------------------------------------

def topology_groups(n: int, mean_degrees=PLACEHOLDER_MEAN_DEGREES, rewiring=(0.01, 0.1, 1.0)) -> list[GroupSpec]:
    """Small-world panels over rewiring, then SF / ER / RR at matched mean degree."""
    groups = []
    for k in mean_degrees:
        groups += [GroupSpec("ws", {"k": k, "p": p}) for p in rewiring]
    for k in mean_degrees:
        groups += [
            GroupSpec("sf", {"m": k // 2}),
            GroupSpec("er", {"p": k / (n - 1)}, label=f"er(k={k})"),
            GroupSpec("rr", {"k": k}),
        ]
    return groups


def desk_preset(master_seed: int = 0) -> ExperimentConfig:
    return ExperimentConfig(n=30, groups=topology_groups(30), trials=30, t_max=500, master_seed=master_seed)


def full_scale_preset(master_seed: int = 0) -> ExperimentConfig:
    return ExperimentConfig(
        n=100,
        groups=topology_groups(100),
        trials=30,
        t_max=2000,
        checkpoints=list(range(0, 2001, 100)),
        master_seed=master_seed,
    )
