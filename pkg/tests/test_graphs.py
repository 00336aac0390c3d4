import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netlinsolve.errors import Disconnected, InvalidParams
from netlinsolve.graphs import (
    complete_graph,
    cycle_graph,
    degree_stats,
    diameter,
    from_edges,
    gen_er,
    gen_rr,
    gen_sf,
    gen_ws,
    make_network,
    path_graph,
    read_edgelist,
    write_edgelist,
)


def bfs_diameter(adj):
    g = nx.from_numpy_array(np.array(adj) - np.eye(len(adj), dtype=int))
    return nx.diameter(g)


def check_invariants(net):
    A = net.adjacency
    assert np.all(np.diag(A) == 1)
    assert np.array_equal(A, A.T)
    assert set(np.unique(A)) <= {0, 1}
    g = nx.from_numpy_array(A - np.eye(net.n, dtype=int))
    assert nx.is_connected(g)
    if net.n >= 2:
        assert net.degrees.min() >= 2


def test_er_complete_when_p_is_one():
    net = gen_er(5, 1.0, 3)
    assert np.all(net.adjacency == 1)
    assert np.all(net.degrees == 5)
    assert np.all(gen_er(2, 1.0, 0).degrees == 2)


def test_er_mean_degree_binomial():
    net = gen_er(100, 0.05, 7)
    check_invariants(net)
    mean, _, _ = degree_stats(net)
    # mean degree = 1 + 2E/n with E ~ Bin(4950, p)
    sd = 2 * np.sqrt(4950 * 0.05 * 0.95) / 100
    assert abs(mean - (1 + 99 * 0.05)) <= 3 * sd


def test_ws_no_rewiring_is_cycle():
    net = gen_ws(6, 2, 0.0, 1)
    assert np.all(net.degrees == 3)
    assert diameter(net) == 3


def test_ws_lattice_diameter():
    net = gen_ws(100, 4, 0.0, 0)
    assert diameter(net) == 25
    assert bfs_diameter(net.adjacency) == 25


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ws_full_rewiring_keeps_edge_count(seed):
    net = gen_ws(100, 4, 1.0, seed)
    check_invariants(net)
    assert net.edge_count == 200
    assert net.degrees.mean() == pytest.approx(5.0)


def test_sf_small_is_clique():
    net = gen_sf(4, 3, 11)
    assert np.all(net.adjacency == 1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sf_degree_profile(seed):
    net = gen_sf(100, 2, seed)
    check_invariants(net)
    nonself = net.degrees - 1
    assert abs(nonself.mean() - 4) < 0.1
    assert nonself.max() >= 2 * nonself.mean()


def test_rr_regular():
    net = gen_rr(6, 3, 4)
    assert np.all(net.degrees == 4)
    assert np.all(gen_rr(4, 3, 0).adjacency == 1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_rr_diameter(seed):
    net = gen_rr(100, 6, seed)
    check_invariants(net)
    assert np.all(net.degrees == 7)
    assert bfs_diameter(net.adjacency) == diameter(net) <= 6


def test_rr_rejects_odd_stub_count():
    with pytest.raises(InvalidParams):
        gen_rr(5, 3, 0)


@settings(max_examples=40, deadline=None)
@given(
    fam=st.sampled_from(["er", "ws", "sf", "rr"]),
    n=st.integers(6, 30),
    seed=st.integers(0, 10**6),
)
def test_generators_satisfy_invariants(fam, n, seed):
    if fam == "er":
        net = gen_er(n, 0.5, seed)
    elif fam == "ws":
        net = gen_ws(n, 4, 0.3, seed)
        assert net.edge_count == 2 * n
    elif fam == "sf":
        net = gen_sf(n, 2, seed)
    else:
        k = 3 if n % 2 == 0 else 4
        net = gen_rr(n, k, seed)
        assert len(set(net.degrees.tolist())) == 1
    check_invariants(net)


def test_generators_deterministic():
    assert np.array_equal(gen_er(30, 0.2, 5).adjacency, gen_er(30, 0.2, 5).adjacency)
    assert np.array_equal(gen_rr(30, 4, 5).adjacency, gen_rr(30, 4, 5).adjacency)
    assert np.array_equal(gen_sf(30, 2, 5).adjacency, gen_sf(30, 2, 5).adjacency)


def test_diameter_simple_shapes():
    assert diameter(complete_graph(5)) == 1
    assert diameter(path_graph(4)) == 3


def test_diameter_disconnected():
    net = from_edges(4, [(0, 1), (2, 3)], check_connected=False)
    with pytest.raises(Disconnected):
        diameter(net)
    with pytest.raises(Disconnected):
        make_network(net.adjacency)


def test_degree_stats_regular_shapes():
    assert degree_stats(complete_graph(5))[:2] == (5.0, 0.0)
    mean, var, hist = degree_stats(cycle_graph(6))
    assert (mean, var, hist) == (3.0, 0.0, {3: 6})


def test_scale_free_more_heterogeneous_than_regular():
    assert degree_stats(gen_sf(100, 2, 1))[1] > degree_stats(gen_rr(100, 4, 1))[1]


def test_edgelist_round_trip(tmp_path):
    net = gen_er(12, 0.4, 2)
    path = tmp_path / "g.edges"
    write_edgelist(path, net)
    lines = path.read_text().splitlines()
    assert lines[0] == "n=12"
    assert all(" " in ln and ln.split()[0] != ln.split()[1] for ln in lines[1:])
    assert np.array_equal(read_edgelist(path).adjacency, net.adjacency)
