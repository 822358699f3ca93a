import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from restart_rank.errors import (
    DimensionMismatch,
    EmptyGraph,
    GraphParseError,
    NegativeWeight,
    SingleNodeDangling,
)
from restart_rank.graph import (
    DENSE_LIMIT,
    augmented_matrix,
    build_graph,
    check_weak_connectivity,
    read_edge_list,
    transition_matrix,
)
from restart_rank.restart import constant_model, custom_model, point_mass

from graphs import edge, path, random_distribution, random_graph, star


def test_single_undirected_edge():
    g = edge()
    np.testing.assert_array_equal(g.out_weight, [1, 1])
    assert g.repaired == ()


def test_dangling_node_repaired_to_all_others():
    g = build_graph([(0, 1, 1), (1, 2, 1)], directed=True)
    assert g.repaired == (2,)
    assert sorted(g.edges) == [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 0.5), (2, 1, 0.5)]


def test_path_degrees():
    g = path(3)
    np.testing.assert_array_equal(g.out_weight, [1, 2, 1])
    assert g.out_weight.sum() == 4


def test_duplicate_arcs_merge_by_sum():
    g = build_graph([(0, 1, 1.5), (0, 1, 2.0), (1, 0, 1.0)], directed=True)
    assert g.W[0, 1] == 3.5


def test_undirected_self_loop_counted_once():
    g = build_graph([(0, 0, 2.0), (0, 1, 1.0)], directed=False)
    assert g.W[0, 0] == 2.0
    np.testing.assert_array_equal(g.out_weight, [3, 1])


def test_isolated_trailing_node_is_repaired():
    g = build_graph([(0, 1)], directed=False, n=3)
    assert g.repaired == (2,)
    np.testing.assert_allclose(g.W.toarray()[2], [0.5, 0.5, 0.0])


@pytest.mark.parametrize(
    "edges, kwargs, exc",
    [
        ([], {}, EmptyGraph),
        ([(0, 1, -1.0)], {}, NegativeWeight),
        ([("a", "a", 0.0)], {}, SingleNodeDangling),
        ([(0, 1)], {"n": 1}, DimensionMismatch),
        ([(0, 1, 2, 3)], {}, GraphParseError),
    ],
)
def test_build_errors(edges, kwargs, exc):
    with pytest.raises(exc):
        build_graph(edges, **kwargs)


def test_single_node_with_self_loop_is_fine():
    g = build_graph([(0, 0, 1.0)])
    assert g.n == 1
    np.testing.assert_array_equal(transition_matrix(g), [[1.0]])


def test_string_labels_in_first_appearance_order():
    g = build_graph([("b", "a"), ("a", "c")], directed=False)
    assert g.node_labels == ("b", "a", "c")
    assert g.index_of("c") == 2
    assert g.label(0) == "b"


@pytest.mark.parametrize(
    "g, expected",
    [
        (path(3), True),
        (build_graph([(0, 1), (2, 3)], directed=False), False),
        (star(3), True),
    ],
)
def test_weak_connectivity(g, expected):
    assert check_weak_connectivity(g) is expected


def test_transition_examples():
    np.testing.assert_array_equal(transition_matrix(edge()), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(transition_matrix(path(3))[1], [0.5, 0, 0.5])
    g = build_graph([(0, 1, 2.0), (0, 2, 2.0)], directed=True)
    np.testing.assert_array_equal(transition_matrix(g)[0], [0, 0.5, 0.5])


def test_transition_rows_sum_to_one_on_random_graphs():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, int(rng.integers(2, 51)), directed=bool(seed % 2), weighted=True)
        P = transition_matrix(g)
        assert g.out_weight.min() > 0
        assert P.min() >= 0
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12, rtol=0)


def test_large_graph_uses_sparse_storage():
    n = DENSE_LIMIT + 10
    g = build_graph([(i, (i + 1) % n) for i in range(n)], directed=False)
    P = transition_matrix(g)
    assert not isinstance(P, np.ndarray)
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)


def test_undirected_weights_stay_symmetric():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 40, directed=False, weighted=True, density=4)
        assert (g.W != g.W.T).nnz == 0
        assert g.is_symmetric


def test_augmented_no_restart_is_P():
    g = path(4)
    m = custom_model(g, np.ones(g.n))
    np.testing.assert_array_equal(augmented_matrix(g, m), transition_matrix(g))


def test_augmented_always_restart_rows_are_v():
    g = path(4)
    v = np.array([0.1, 0.2, 0.3, 0.4])
    P_tilde = augmented_matrix(g, constant_model(g, 0.0, v))
    np.testing.assert_array_equal(P_tilde, np.tile(v, (4, 1)))


def test_augmented_two_node_hand_computation():
    g = edge()
    P_tilde = augmented_matrix(g, constant_model(g, 0.5, point_mass(2, 0)))
    np.testing.assert_array_equal(P_tilde, [[0.5, 0.5], [1.0, 0.0]])


def test_augmented_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        augmented_matrix(path(4), constant_model(path(3), 0.5))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 30), directed=st.booleans())
def test_augmented_rows_stochastic(seed, n, directed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, directed=directed, weighted=True)
    alpha = rng.uniform(0, 1, n)
    alpha[rng.random(n) < 0.2] = 1.0
    alpha[rng.random(n) < 0.2] = 0.0
    P_tilde = augmented_matrix(g, custom_model(g, alpha, random_distribution(rng, n)))
    assert P_tilde.min() >= 0
    np.testing.assert_allclose(P_tilde.sum(axis=1), 1.0, atol=1e-12, rtol=0)


def test_read_edge_list_format():
    text = io.StringIO("# comment\n\na b 2.5\nb c\n")
    g = read_edge_list(text)
    assert g.node_labels == ("a", "b", "c")
    assert g.W[0, 1] == 2.5 and g.W[1, 2] == 1.0
    assert g.repaired == (2,)


def test_read_edge_list_undirected(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n1 2\n", encoding="utf-8")
    g = read_edge_list(f, undirected=True)
    np.testing.assert_array_equal(g.out_weight, [1, 2, 1])
    assert g.is_symmetric


@pytest.mark.parametrize("text", ["a\n", "a b c d\n", "a b heavy\n"])
def test_read_edge_list_rejects_bad_lines(text):
    with pytest.raises(GraphParseError):
        read_edge_list(io.StringIO(text))
