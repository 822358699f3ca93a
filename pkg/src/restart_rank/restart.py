"""Node-dependent restart models: damping vector ``alpha`` and restart law ``v``."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AlphaOutOfRange,
    BadDistribution,
    ConfigError,
    DimensionMismatch,
    NonpositiveJumpWeight,
    StabilityViolation,
)
from .graph import Graph, augmented_matrix

DIST_TOL = 1e-12


class ModelKind(str, enum.Enum):
    CUSTOM = "custom"
    CONSTANT = "constant"
    DEGREE_POWER = "degree_power"
    RWJ = "rwj"


@dataclass(frozen=True, eq=False)
class RestartModel:
    """Continuation probabilities ``alpha`` (restart w.p. ``1 - alpha_i`` at node i)
    and restart distribution ``v``.

    ``params`` records the arguments of the generating constructor so the
    vectors can be regenerated with :meth:`regenerate`.
    """

    alpha: np.ndarray
    v: np.ndarray
    kind: ModelKind = ModelKind.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        v = np.array(self.v, dtype=float)
        if alpha.ndim != 1 or v.shape != alpha.shape:
            raise DimensionMismatch(f"alpha {alpha.shape} and v {v.shape} must be equal-length vectors")
        if not np.all(np.isfinite(alpha)) or alpha.min() < 0 or alpha.max() > 1:
            raise AlphaOutOfRange("every alpha_i must lie in [0, 1]")
        _check_distribution(v)
        alpha.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "kind", ModelKind(self.kind))

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def restart_prob(self) -> np.ndarray:
        return 1.0 - self.alpha

    def check_dims(self, g: Graph) -> None:
        if self.n != g.n:
            raise DimensionMismatch(f"model has {self.n} nodes, graph has {g.n}")

    def with_v(self, v) -> "RestartModel":
        return RestartModel(self.alpha, v, ModelKind.CUSTOM, {})

    def regenerate(self, g: Graph) -> "RestartModel":
        """Rebuild from ``kind`` and ``params``; custom models return themselves."""
        p = self.params
        if self.kind is ModelKind.CONSTANT:
            return constant_model(g, p["alpha"], self.v)
        if self.kind is ModelKind.DEGREE_POWER:
            return degree_power_model(g, p["a"], p["sigma"], self.v)
        if self.kind is ModelKind.RWJ:
            return rwj_model(g, p["a"])
        return self


def _check_distribution(v: np.ndarray) -> None:
    if not np.all(np.isfinite(v)) or v.min() < 0:
        raise BadDistribution("restart distribution has negative or non-finite entries")
    if abs(v.sum() - 1.0) > DIST_TOL:
        raise BadDistribution(f"restart distribution sums to {v.sum()!r}, not 1")


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def point_mass(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _as_distribution(g: Graph, v) -> np.ndarray:
    if v is None:
        return uniform(g.n)
    v = np.asarray(v, dtype=float)
    if v.shape != (g.n,):
        raise DimensionMismatch(f"v has shape {v.shape}, graph has {g.n} nodes")
    return v


def custom_model(g: Graph, alpha, v=None) -> RestartModel:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (g.n,):
        raise DimensionMismatch(f"alpha has shape {alpha.shape}, graph has {g.n} nodes")
    return RestartModel(alpha, _as_distribution(g, v), ModelKind.CUSTOM)


def constant_model(g: Graph, alpha: float, v=None) -> RestartModel:
    """Classic personalized PageRank: the same continuation probability at every node."""
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise AlphaOutOfRange(f"constant alpha must be in [0, 1), got {alpha}")
    return RestartModel(
        np.full(g.n, alpha), _as_distribution(g, v), ModelKind.CONSTANT, {"alpha": alpha}
    )


def degree_power_model(g: Graph, a: float, sigma: float, v=None) -> RestartModel:
    """Restart probability ``a * d_i**sigma`` (so ``alpha = 1 - a d^sigma``).

    Requires ``a > 0`` and ``a * max_i d_i**sigma < 1``; ``d`` is the repaired
    out-weight.
    """
    a = float(a)
    sigma = float(sigma)
    if not a > 0:
        raise AlphaOutOfRange(f"degree-power scale a must be positive, got {a}")
    dpow = np.asarray(g.out_weight, dtype=float) ** sigma
    bound = a * dpow.max()
    if bound >= 1.0:
        raise StabilityViolation(f"a * d_max^sigma = {bound:.6g} >= 1")
    return RestartModel(
        1.0 - a * dpow, _as_distribution(g, v), ModelKind.DEGREE_POWER, {"a": a, "sigma": sigma}
    )


def rwj_model(g: Graph, a) -> RestartModel:
    """Random walk with jumps: ``alpha_i = d_i / (d_i + a_i)``, ``v ∝ a``.

    ``a`` is a positive scalar (uniform jump weight) or a per-node vector.
    """
    a_vec = np.broadcast_to(np.asarray(a, dtype=float), (g.n,)).copy()
    if not np.all(np.isfinite(a_vec)) or a_vec.min() <= 0:
        raise NonpositiveJumpWeight("jump weights a_i must be positive")
    d = np.asarray(g.out_weight, dtype=float)
    alpha = d / (d + a_vec)
    # equal jump weights give exactly the uniform law
    v = uniform(g.n) if np.all(a_vec == a_vec[0]) else a_vec / a_vec.sum()
    a_param = float(a) if np.ndim(a) == 0 else a_vec
    return RestartModel(alpha, v, ModelKind.RWJ, {"a": a_param})


def rwj_transition_check(g: Graph, a: float) -> float:
    """Max deviation between the RWJ walk-with-restart matrix and the
    jump-augmented graph's transition probabilities.

    On an unweighted undirected graph the walk on ``G`` plus weight ``a/n``
    between every ordered pair (self-loops included) moves ``i -> j`` with
    probability ``(a + n) / (n (d_i + a))`` across an edge and
    ``a / (n (d_i + a))`` otherwise.
    """
    n = g.n
    d = np.asarray(g.out_weight, dtype=float)
    adj = g.dense_adjacency() > 0
    on_edge = (a + n) / (n * (d + a))
    off_edge = a / (n * (d + a))
    expected = np.where(adj, on_edge[:, None], off_edge[:, None])
    got = augmented_matrix(g, rwj_model(g, a))
    return float(np.abs(got - expected).max())


# ---------------------------------------------------------------- config files


def _resolve_v(g: Graph, spec) -> np.ndarray:
    if spec is None or spec == "uniform":
        return uniform(g.n)
    if isinstance(spec, str):
        if spec.startswith("node:"):
            label = spec[len("node:"):]
            try:
                return point_mass(g.n, g.index_of(label))
            except KeyError as exc:
                raise ConfigError(f"restart node {label!r} not in graph") from exc
        raise ConfigError(f"unknown v shorthand {spec!r}")
    weights = _per_node(g, spec, "v")
    if weights.min() < 0 or weights.sum() <= 0:
        raise BadDistribution("v weights must be non-negative with positive sum")
    return weights / weights.sum()


def _per_node(g: Graph, spec, name: str, default: float | None = None) -> np.ndarray:
    if isinstance(spec, dict):
        out = np.full(g.n, np.nan if default is None else default)
        for label, val in spec.items():
            try:
                out[g.index_of(label)] = float(val)
            except KeyError as exc:
                raise ConfigError(f"{name}: node {label!r} not in graph") from exc
        if np.isnan(out).any():
            raise ConfigError(f"{name}: missing values for some nodes")
        return out
    try:
        arr = np.asarray(spec, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected a number list or node map") from exc
    if arr.shape != (g.n,):
        raise ConfigError(f"{name}: expected {g.n} values, got shape {arr.shape}")
    return arr


def _read_node_values(path: Path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'node alpha'")
            try:
                values[parts[0]] = float(parts[1])
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value {parts[1]!r}") from None
    return values


def model_from_config(g: Graph, cfg: dict, base_dir: str | os.PathLike = ".") -> RestartModel:
    """Build a model from a parsed restart config mapping."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigError("restart config must be an object with a 'kind' field")
    kind = cfg["kind"]
    try:
        if kind == "constant":
            return constant_model(g, cfg["alpha"], _resolve_v(g, cfg.get("v")))
        if kind == "degree_power":
            return degree_power_model(g, cfg["a"], cfg.get("sigma", 1.0), _resolve_v(g, cfg.get("v")))
        if kind == "rwj":
            if "v" in cfg:
                raise ConfigError("rwj derives v from the jump weights; drop 'v'")
            a = cfg.get("a", 1.0)
            a = a if isinstance(a, (int, float)) else _per_node(g, a, "a")
            return rwj_model(g, a)
        if kind == "custom":
            alpha = cfg["alpha"]
            if isinstance(alpha, str):
                alpha = _read_node_values(Path(base_dir) / alpha)
            return custom_model(g, _per_node(g, alpha, "alpha"), _resolve_v(g, cfg.get("v")))
    except KeyError as exc:
        raise ConfigError(f"{kind} config missing field {exc.args[0]!r}") from None
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown restart kind {kind!r}")


def load_restart_config(path, g: Graph) -> RestartModel:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return model_from_config(g, cfg, base_dir=path.parent)
