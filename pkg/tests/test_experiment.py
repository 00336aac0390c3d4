import json

import numpy as np
import pytest

from netlinsolve.errors import ConfigError, EmptyInput, GenerationFailed
from netlinsolve.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    GroupSpec,
    QuantileRow,
    SystemSpec,
    derive_seed,
    desk_preset,
    gen_random_system,
    load_config,
    full_scale_preset,
    quantiles,
    run_experiment,
    write_metadata,
    write_results_csv,
)
from netlinsolve.linalg import condition_numbers


def _small(groups, **kw):
    base = dict(n=12, groups=groups, trials=3, t_max=40, master_seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


# -- quantiles -------------------------------------------------------------

def test_quantiles_five_points():
    assert quantiles([1, 2, 3, 4, 5]) == (1.0, 2.0, 3.0, 4.0, 5.0)


def test_quantiles_single_point():
    assert quantiles([7]) == (7.0,) * 5


def test_quantiles_uniform_median():
    x = np.random.default_rng(0).uniform(size=1000)
    mn, q1, med, q3, mx = quantiles(x)
    assert abs(med - 0.5) < 0.05
    assert mn <= q1 <= med <= q3 <= mx


def test_quantiles_empty():
    with pytest.raises(EmptyInput):
        quantiles([])


# -- systems and seeds -----------------------------------------------------

def test_system_cap_unreachable():
    with pytest.raises(GenerationFailed):
        gen_random_system(5, SystemSpec(cond_cap=1.0 + 1e-9), seed=0)


def test_system_respects_cap_and_seed():
    spec = SystemSpec(cond_cap=50.0)
    a = gen_random_system(6, spec, seed=4)
    b = gen_random_system(6, spec, seed=4)
    np.testing.assert_array_equal(a.A, b.A)
    np.testing.assert_array_equal(a.b, b.b)
    kappa, _ = condition_numbers(a)
    assert kappa <= 50.0 * (1 + 1e-12)
    assert np.all((a.A >= -1) & (a.A <= 1))


def test_derive_seed_streams_differ():
    seeds = {derive_seed(0, g, t, tag) for g in (None, 0, 1) for t in range(3) for tag in ("graph", "system")}
    assert len(seeds) == 18
    assert derive_seed(5, 1, 2, "graph") == derive_seed(5, 1, 2, "graph")


# -- config ----------------------------------------------------------------

def test_rr_odd_degree_sum_names_group():
    cfg = _small([GroupSpec("er", {"p": 0.3}), GroupSpec("rr", {"k": 3})], n=11)
    with pytest.raises(ConfigError, match=r"group 1 \(rr\(k=3\)\)"):
        cfg.validate()


@pytest.mark.parametrize(
    "bad",
    [
        {"n": 10, "groups": [{"family": "er", "params": {"p": 0.5}}], "bogus": 1},
        {"n": 10, "groups": [{"family": "xx", "params": {}}]},
        {"n": 10, "groups": [{"family": "ws", "params": {"k": 3, "p": 0.1}}]},
        {"n": 10, "groups": [{"family": "er", "params": {"p": 0.5, "k": 4}}]},
        {"n": 10, "groups": [{"family": "sf", "params": {}}]},
        {"n": 10, "groups": []},
        {"n": 10, "groups": [{"family": "er", "params": {"p": 0.5}}], "checkpoints": [600]},
    ],
)
def test_bad_configs(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(bad)


def test_config_round_trip(tmp_path):
    cfg = _small([GroupSpec("ws", {"k": 4, "p": 0.1})])
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    back = load_config(p)
    assert back.to_dict() == cfg.to_dict()


def test_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_presets_validate():
    desk = desk_preset()
    desk.validate()
    assert desk.n == 30 and len(desk.groups) == 18
    big = full_scale_preset()
    big.validate()
    assert big.checkpoint_list[-1] == 2000 and big.n == 100


# -- running ---------------------------------------------------------------

def test_single_trial_quantiles_degenerate():
    res = run_experiment(_small([GroupSpec("er", {"p": 0.4})], trials=1))
    for row in res.rows:
        assert row.min == row.q1 == row.median == row.q3 == row.max


def test_rows_ordered_and_start_at_one():
    res = run_experiment(_small([GroupSpec("er", {"p": 0.4}), GroupSpec("rr", {"k": 4})]))
    marks = res.config.checkpoint_list
    assert [r.t for r in res.rows] == marks * 2
    for row in res.rows:
        assert row.min <= row.q1 <= row.median <= row.q3 <= row.max
        if row.t == 0:
            assert row.median == 1.0
    assert res.groups[1].mean_degree == 5.0


def _median_at_300(groups, master_seed):
    cfg = ExperimentConfig(n=30, groups=groups, trials=10, t_max=300, checkpoints=[300], master_seed=master_seed)
    res = run_experiment(cfg)
    return [res.median_at(g, 300) for g in range(len(groups))]


@pytest.mark.parametrize(
    "master_seed",
    [
        pytest.param(
            0,
            marks=pytest.mark.xfail(
                strict=True, reason="this draw inverts the ordering (0.057 vs 0.061); the gap is within trial noise"
            ),
        ),
        1,
        2,
    ],
)
def test_denser_er_converges_faster(master_seed):
    sparse, dense = _median_at_300([GroupSpec("er", {"p": 0.2}), GroupSpec("er", {"p": 0.4})], master_seed)
    assert dense < sparse


@pytest.mark.parametrize("master_seed", [0, 1, 2])
def test_regular_beats_scale_free(master_seed):
    sf, rr = _median_at_300([GroupSpec("sf", {"m": 2}), GroupSpec("rr", {"k": 4})], master_seed)
    assert rr < sf


def test_csv_is_byte_identical_and_parallel_matches(tmp_path):
    groups = [GroupSpec("ws", {"k": 4, "p": 0.1}), GroupSpec("sf", {"m": 2})]
    paths = []
    for i, workers in enumerate((1, 1, 2)):
        res = run_experiment(_small(groups, workers=workers))
        p = tmp_path / f"r{i}.csv"
        write_results_csv(p, res.rows)
        paths.append(p)
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]
    assert data[0].decode().splitlines()[0] == ",".join(CSV_HEADER)


def test_metadata(tmp_path):
    res = run_experiment(_small([GroupSpec("er", {"k": 4})]))
    p = tmp_path / "m.json"
    write_metadata(p, res)
    meta = json.loads(p.read_text())
    assert meta["whiskers"].startswith("min/max")
    assert meta["groups"][0]["mean_degree_no_loops"] == pytest.approx(meta["groups"][0]["mean_degree"] - 1)


def test_quantile_row_fields():
    row = QuantileRow("g", "er", "p=0.1", 10, 0.1, 0.2, 0.3, 0.4, 0.5)
    assert (row.min, row.q1, row.median, row.q3, row.max) == (0.1, 0.2, 0.3, 0.4, 0.5)
