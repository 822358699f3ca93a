"""Occupation-time (pi) and location-of-restart (rho) scores.

Everything here reduces to the row vector ``x = v^T [I - A P]^{-1}``, the
expected number of visits to each node before the first restart when the walk
starts from ``v``:

* ``pi  = x / sum(x)``
* ``rho = x * (1 - alpha)``
* ``sum(x)`` is the expected number of steps between restarts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DenseOnly,
    NoConvergence,
    OracleSizeExceeded,
    SolverError,
    SolverPreconditionAlphaOne,
)
from .graph import DENSE_LIMIT, Graph, apply_transition_left, dense_transition
from .restart import RestartModel

NORMALIZATION_TOL = 1e-10


class Mode(str, enum.Enum):
    AUTO = "auto"
    DENSE = "dense"
    ITERATIVE = "iterative"


class Method(str, enum.Enum):
    DENSE_DIRECT = "dense_direct"
    FIXED_POINT = "fixed_point"
    POWER_ITERATION = "power_iteration"
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-12
    max_iterations: int = 1_000_000
    mode: Mode = Mode.AUTO

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        object.__setattr__(self, "mode", Mode(self.mode))

    def use_dense(self, n: int) -> bool:
        if self.mode is Mode.AUTO:
            return n <= DENSE_LIMIT
        return self.mode is Mode.DENSE


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class ScoreVector:
    values: np.ndarray
    method: Method
    residual: float
    iterations: int = 0

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _require_restart(m: RestartModel) -> None:
    if m.alpha.max() >= 1.0:
        raise SolverPreconditionAlphaOne(
            "closed-form solvers need max(alpha) < 1; "
            f"node {int(np.argmax(m.alpha))} never restarts"
        )


def _fixed_point_residual(P, alpha, v, x) -> float:
    return float(np.abs(x - v - apply_transition_left(P, x * alpha)).sum())


@dataclass(frozen=True, eq=False)
class _Resolvent:
    x: np.ndarray
    method: Method
    residual: float
    iterations: int


def _solve_resolvent(g: Graph, m: RestartModel, v, cfg: SolverConfig) -> _Resolvent:
    m.check_dims(g)
    _require_restart(m)
    v = np.asarray(v, dtype=float)
    alpha = m.alpha
    if cfg.use_dense(g.n):
        P = dense_transition(g)
        M = np.eye(g.n) - alpha[:, None] * P
        # x M = v  <=>  M^T x^T = v^T
        lu = scipy.linalg.lu_factor(M.T)
        x = scipy.linalg.lu_solve(lu, v)
        # one refinement step; cheap with the factorization in hand
        x += scipy.linalg.lu_solve(lu, v - x @ M)
        return _Resolvent(x, Method.DENSE_DIRECT, _fixed_point_residual(P, alpha, v, x), 0)

    P = g.transition
    x = v.copy()
    for it in range(1, cfg.max_iterations + 1):
        x_new = v + apply_transition_left(P, x * alpha)
        residual = float(np.abs(x_new - x).sum())
        x = x_new
        if residual < cfg.tolerance:
            return _Resolvent(x, Method.FIXED_POINT, _fixed_point_residual(P, alpha, v, x), it)
    raise NoConvergence(f"fixed-point iteration did not reach {cfg.tolerance} in {cfg.max_iterations} steps")


def resolvent_row(g: Graph, m: RestartModel, v=None, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Solve ``x = v + x A P``; entry ``j`` is the expected number of visits
    to ``j`` before restart for a walk started from ``v`` (default ``m.v``)."""
    v = m.v if v is None else v
    return _solve_resolvent(g, m, v, cfg).x


def _finalize(values: np.ndarray, what: str) -> np.ndarray:
    total = values.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise SolverError(f"{what} sums to {total!r}; expected 1 within {NORMALIZATION_TOL}")
    return np.clip(values, 0.0, None)


def occupation_ppr(g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG) -> ScoreVector:
    """Long-run fraction of time the restart walk spends at each node."""
    res = _solve_resolvent(g, m, m.v, cfg)
    pi = res.x / res.x.sum()
    return ScoreVector(_finalize(pi, "pi"), res.method, res.residual, res.iterations)


def location_ppr(g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG) -> ScoreVector:
    """Distribution of the node occupied just before a restart.

    Sums to one without renormalization; the sum is asserted instead.
    """
    res = _solve_resolvent(g, m, m.v, cfg)
    rho = res.x * (1.0 - m.alpha)
    return ScoreVector(_finalize(rho, "rho"), res.method, res.residual, res.iterations)


def occupation_ppr_power(g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG) -> ScoreVector:
    """Stationary law of the walk-with-restart chain by left power iteration.

    Starts from the uniform vector and stops when successive iterates are
    within ``cfg.tolerance`` in L1. The augmented matrix is applied implicitly,
    so this works for sparse graphs too. A chain that never restarts and is
    periodic raises :class:`NoConvergence`.
    """
    m.check_dims(g)
    P = g.transition
    alpha, v = m.alpha, m.v
    restart = 1.0 - alpha
    x = np.full(g.n, 1.0 / g.n)
    for it in range(1, cfg.max_iterations + 1):
        x_new = apply_transition_left(P, x * alpha) + (x @ restart) * v
        # keep round-off from drifting the total mass
        x_new /= x_new.sum()
        delta = float(np.abs(x_new - x).sum())
        x = x_new
        if delta < cfg.tolerance:
            return ScoreVector(_finalize(x, "pi"), Method.POWER_ITERATION, delta, it)
    raise NoConvergence(
        f"power iteration did not settle below {cfg.tolerance} in {cfg.max_iterations} steps"
    )


def expected_restart_time(
    g: Graph, m: RestartModel, start=None, cfg: SolverConfig = DEFAULT_CONFIG
) -> float:
    """Expected number of steps between consecutive restarts, starting from
    ``start`` (a distribution, default ``m.v``)."""
    return float(resolvent_row(g, m, m.v if start is None else start, cfg).sum())


def expected_visits_matrix(g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Dense ``[I - A P]^{-1}``: entry ``(i, j)`` is the expected number of
    visits to ``j`` before restart for a walk started at ``i``."""
    m.check_dims(g)
    _require_restart(m)
    if g.n > DENSE_LIMIT:
        raise DenseOnly(f"n={g.n} exceeds dense limit {DENSE_LIMIT}")
    P = dense_transition(g)
    return scipy.linalg.inv(np.eye(g.n) - m.alpha[:, None] * P)


ORACLE_MAX_NODES = 8
ORACLE_MAX_STEPS = 64


def path_sum_oracle(g: Graph, m: RestartModel, i: int, j: int, k_max: int) -> float:
    """Expected visits to ``j`` from ``i`` before restart, summed path by path.

    Adds up ``prod alpha_u W_uw / d_u`` over every walk ``i -> ... -> j`` of at
    most ``k_max`` steps (the empty walk counts when ``i == j``). Walks are
    grouped by their current endpoint so the sum stays polynomial, but no
    linear algebra is involved. Test oracle for tiny graphs only.
    """
    if g.n > ORACLE_MAX_NODES or k_max > ORACLE_MAX_STEPS:
        raise OracleSizeExceeded(
            f"oracle limited to n <= {ORACLE_MAX_NODES}, k_max <= {ORACLE_MAX_STEPS}"
        )
    alpha = [float(a) for a in m.alpha]
    d = [float(x) for x in g.out_weight]
    arcs = g.edges
    weight_at = [0.0] * g.n  # total weight of length-k walks from i, by endpoint
    weight_at[i] = 1.0
    total = weight_at[j]
    for _ in range(k_max):
        nxt = [0.0] * g.n
        for u, w, wt in arcs:
            nxt[w] += weight_at[u] * alpha[u] * wt / d[u]
        weight_at = nxt
        total += weight_at[j]
    return total


def path_sum_bound(m: RestartModel, k_max: int) -> float:
    """Truncation bound for :func:`path_sum_oracle`; ``P`` has spectral radius 1."""
    amax = float(m.alpha.max())
    return amax ** k_max / (1.0 - amax)
