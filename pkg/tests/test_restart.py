import json

import numpy as np
import pytest

from restart_rank.errors import (
    AlphaOutOfRange,
    BadDistribution,
    ConfigError,
    NonpositiveJumpWeight,
    StabilityViolation,
)
from restart_rank.restart import (
    ModelKind,
    RestartModel,
    constant_model,
    custom_model,
    degree_power_model,
    load_restart_config,
    model_from_config,
    rwj_model,
    rwj_transition_check,
)

from graphs import cycle, edge, path, random_graph, star, triangle


def test_constant_model():
    g = cycle(4)
    m = constant_model(g, 0.85)
    np.testing.assert_array_equal(m.alpha, [0.85] * 4)
    np.testing.assert_array_equal(m.v, [0.25] * 4)
    assert m.kind is ModelKind.CONSTANT


@pytest.mark.parametrize("alpha", [-0.1, 1.0, 1.5])
def test_constant_model_range(alpha):
    with pytest.raises(AlphaOutOfRange):
        constant_model(edge(), alpha)


@pytest.mark.parametrize("v", [[0.5, 0.6], [-0.5, 1.5], [1.0, np.nan]])
def test_bad_distribution(v):
    with pytest.raises(BadDistribution):
        constant_model(edge(), 0.5, v)


def test_degree_power_sigma_zero_is_constant():
    g = path(5)
    a = degree_power_model(g, 0.2, 0.0)
    b = constant_model(g, 0.8)
    np.testing.assert_array_equal(a.alpha, b.alpha)
    np.testing.assert_array_equal(a.v, b.v)


def test_degree_power_path():
    m = degree_power_model(path(3), 0.1, 1.0)
    np.testing.assert_allclose(m.alpha, [0.9, 0.8, 0.9], rtol=0, atol=1e-15)


def test_degree_power_rejects_unstable():
    with pytest.raises(StabilityViolation):
        degree_power_model(star(3), 0.4, 1.0)


def test_degree_power_real_sigma():
    m = degree_power_model(star(3), 0.1, -0.5)
    np.testing.assert_allclose(m.alpha, 1 - 0.1 * np.array([3, 1, 1, 1]) ** -0.5)


def test_rwj_uniform_matches_scalar_formula():
    g = path(5)
    d = g.out_weight
    m = rwj_model(g, 1.7)
    np.testing.assert_array_equal(m.alpha, d / (d + 1.7))
    np.testing.assert_array_equal(m.v, np.full(5, 0.2))


def test_rwj_path_examples():
    m = rwj_model(path(3), [1, 1, 1])
    np.testing.assert_allclose(m.alpha, [1 / 2, 2 / 3, 1 / 2], atol=1e-15)
    np.testing.assert_allclose(m.v, [1 / 3] * 3, atol=1e-15)
    m = rwj_model(path(3), [1, 2, 1])
    np.testing.assert_allclose(m.alpha, [1 / 2] * 3, atol=1e-15)
    np.testing.assert_allclose(m.v, [1 / 4, 1 / 2, 1 / 4], atol=1e-15)


def test_rwj_rejects_nonpositive():
    with pytest.raises(NonpositiveJumpWeight):
        rwj_model(path(3), [1, 0, 1])


@pytest.mark.parametrize("g, a", [(triangle(), 1.0), (path(3), 2.0), (edge(), 1.0), (star(4), 0.3)])
def test_rwj_transition_check(g, a):
    assert rwj_transition_check(g, a) <= 1e-12


def test_rwj_transition_check_random_unweighted():
    for seed in range(10):
        g = random_graph(np.random.default_rng(seed), 25, directed=False)
        assert rwj_transition_check(g, 0.7) <= 1e-12


def test_alpha_one_representable():
    m = custom_model(edge(), [1.0, 1.0])
    assert m.alpha.max() == 1.0


def test_alpha_above_one_rejected():
    with pytest.raises(AlphaOutOfRange):
        custom_model(edge(), [1.2, 0.5])


def test_models_are_immutable():
    m = constant_model(path(3), 0.5)
    with pytest.raises(ValueError):
        m.alpha[0] = 0.1


@pytest.mark.parametrize(
    "make",
    [
        lambda g: constant_model(g, 0.3),
        lambda g: degree_power_model(g, 0.01, 1.5),
        lambda g: rwj_model(g, 2.0),
        lambda g: rwj_model(g, np.arange(1, g.n + 1)),
    ],
)
def test_regenerate_reproduces_vectors(make):
    g = random_graph(np.random.default_rng(3), 12)
    m = make(g)
    again = m.regenerate(g)
    np.testing.assert_allclose(again.alpha, m.alpha, atol=1e-12, rtol=0)
    np.testing.assert_allclose(again.v, m.v, atol=1e-12, rtol=0)
    assert again.kind is m.kind


def test_invariants_on_random_models():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 15, weighted=True)
        for m in (rwj_model(g, rng.uniform(0.1, 3, g.n)), constant_model(g, rng.random() * 0.99)):
            assert abs(m.v.sum() - 1) <= 1e-12
            assert 0 <= m.alpha.min() and m.alpha.max() <= 1


# config files

def test_config_kinds(tmp_path):
    g = path(3)
    m = model_from_config(g, {"kind": "constant", "alpha": 0.5, "v": "node:1"})
    np.testing.assert_array_equal(m.v, [0, 1, 0])
    m = model_from_config(g, {"kind": "degree_power", "a": 0.1, "sigma": 1, "v": [1, 1, 2]})
    np.testing.assert_allclose(m.v, [0.25, 0.25, 0.5])
    m = model_from_config(g, {"kind": "rwj", "a": [1, 2, 1]})
    np.testing.assert_allclose(m.v, [0.25, 0.5, 0.25])
    m = model_from_config(g, {"kind": "custom", "alpha": {"0": 0.1, "1": 0.2, "2": 0.3}})
    np.testing.assert_array_equal(m.alpha, [0.1, 0.2, 0.3])


def test_config_custom_alpha_file(tmp_path):
    (tmp_path / "alpha.txt").write_text("# node alpha\n0 0.1\n1 0.2\n2 0.3\n", encoding="utf-8")
    cfg = tmp_path / "restart.json"
    cfg.write_text(json.dumps({"kind": "custom", "alpha": "alpha.txt", "v": "uniform"}), encoding="utf-8")
    m = load_restart_config(cfg, path(3))
    np.testing.assert_array_equal(m.alpha, [0.1, 0.2, 0.3])


@pytest.mark.parametrize(
    "cfg, exc",
    [
        ({"alpha": 0.5}, ConfigError),
        ({"kind": "weird"}, ConfigError),
        ({"kind": "constant"}, ConfigError),
        ({"kind": "constant", "alpha": 0.5, "v": "node:zz"}, ConfigError),
        ({"kind": "constant", "alpha": 0.5, "v": [1, 1]}, ConfigError),
        ({"kind": "rwj", "a": 1, "v": "uniform"}, ConfigError),
        ({"kind": "custom", "alpha": [0.5, 1.5, 0.5]}, AlphaOutOfRange),
        ({"kind": "custom", "alpha": "missing.txt"}, ConfigError),
    ],
)
def test_config_errors(cfg, exc):
    with pytest.raises(exc):
        model_from_config(path(3), cfg)


def test_model_validates_directly():
    with pytest.raises(AlphaOutOfRange):
        RestartModel(np.array([0.5, 2.0]), np.array([0.5, 0.5]))
