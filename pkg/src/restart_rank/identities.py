"""Symmetry identities on undirected graphs and small-restart asymptotics."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from . import solvers
from .errors import AlphaBoundary, DenseOnly, NonUniqueStationary, NoConvergence, NotUndirected
from .graph import DENSE_LIMIT, Graph, dense_transition
from .restart import RestartModel, degree_power_model, point_mass
from .solvers import DEFAULT_CONFIG, SolverConfig

ALL_PAIRS_LIMIT = 500
SAMPLED_PAIRS = 1000


def worker_count() -> int:
    """Thread cap from ``RESTART_RANK_THREADS`` (default 1)."""
    raw = os.environ.get("RESTART_RANK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SymmetryReport:
    max_abs_deviation: float
    worst_pair: tuple[int, int]
    pairs_checked: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_pair"] = list(self.worst_pair)
        return d


def _require_symmetric(g: Graph) -> None:
    if not g.is_symmetric:
        raise NotUndirected("symmetry identities need W == W^T")


def _require_open_alpha(m: RestartModel) -> None:
    if m.alpha.min() <= 0 or m.alpha.max() >= 1:
        raise AlphaBoundary("symmetry identities need 0 < alpha_i < 1 at every node")


def _pairs(n: int, seed: int):
    if n <= ALL_PAIRS_LIMIT:
        iu, ju = np.triu_indices(n)
        return iu, ju
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, SAMPLED_PAIRS), rng.integers(0, n, SAMPLED_PAIRS)


def _per_source(g, m, sources, fn, cfg):
    """Map ``fn(model personalized at i)`` over sources, possibly in threads."""

    def one(i):
        return fn(g, m.with_v(point_mass(g.n, i)), cfg)

    workers = min(worker_count(), len(sources))
    if workers <= 1:
        return {i: one(i) for i in sources}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return dict(zip(sources, pool.map(one, sources)))


def _report(lhs_of, rhs_of, iu, ju) -> SymmetryReport:
    worst, worst_pair = -1.0, (0, 0)
    for i, j in zip(iu, ju):
        dev = abs(lhs_of(i, j) - rhs_of(i, j))
        if dev > worst:
            worst, worst_pair = dev, (int(i), int(j))
    return SymmetryReport(float(worst), worst_pair, len(iu))


def check_occupation_symmetry(
    g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG, seed: int = 0
) -> SymmetryReport:
    """Compare ``d_i pi_j(i) / (alpha_i K_i)`` against ``d_j pi_i(j) / (alpha_j K_j)``
    over node pairs, where ``pi(i)`` is personalized at ``i`` and ``1/K_i`` is
    the expected restart time from ``i``."""
    _require_symmetric(g)
    _require_open_alpha(m)
    iu, ju = _pairs(g.n, seed)
    sources = sorted(set(iu.tolist()) | set(ju.tolist()))

    def solve(gg, mm, cc):
        pi = solvers.occupation_ppr(gg, mm, cc).values
        return pi, solvers.expected_restart_time(gg, mm, mm.v, cc)

    out = _per_source(g, m, sources, solve, cfg)
    d, alpha = g.out_weight, m.alpha

    def side(i, j):
        pi_i, restart_time_i = out[i]
        return d[i] * restart_time_i / alpha[i] * pi_i[j]

    return _report(side, lambda i, j: side(j, i), iu, ju)


def check_location_symmetry(
    g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG, seed: int = 0
) -> SymmetryReport:
    """Compare ``(1-alpha_i)/alpha_i d_i rho_j(i)`` against the same with i, j swapped."""
    _require_symmetric(g)
    _require_open_alpha(m)
    iu, ju = _pairs(g.n, seed)
    sources = sorted(set(iu.tolist()) | set(ju.tolist()))
    out = _per_source(g, m, sources, lambda gg, mm, cc: solvers.location_ppr(gg, mm, cc).values, cfg)
    d, alpha = g.out_weight, m.alpha
    weight = (1.0 - alpha) / alpha * d

    def side(i, j):
        return weight[i] * out[i][j]

    return _report(side, lambda i, j: side(j, i), iu, ju)


def rho_pi_relation_check(g: Graph, m: RestartModel, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """L-inf gap between rho and ``pi (1 - alpha)`` renormalized."""
    pi = solvers.occupation_ppr(g, m, cfg).values
    rho = solvers.location_ppr(g, m, cfg).values
    w = pi * (1.0 - m.alpha)
    return float(np.abs(rho - w / w.sum()).max())


# ---------------------------------------------------------------- asymptotics


@dataclass(frozen=True, eq=False)
class LaurentTerms:
    """Leading terms of ``[I - (P - a D^sigma P)]^{-1} = X_minus1 / a + X_0 + O(a)``."""

    xi: np.ndarray
    H: np.ndarray
    X_minus1: np.ndarray
    X_0: np.ndarray
    T1: np.ndarray
    sigma: float
    epsilon_role: str = "a"

    def approximation(self, a: float) -> np.ndarray:
        return self.X_minus1 / a + self.X_0


def _unique_closed_class(g: Graph) -> bool:
    ncomp, labels = connected_components(g.W, directed=True, connection="strong")
    if ncomp == 1:
        return True
    coo = g.W.tocoo()
    leaves = np.ones(ncomp, dtype=bool)
    cross = labels[coo.row] != labels[coo.col]
    leaves[labels[coo.row[cross]]] = False
    return int(leaves.sum()) == 1


def stationary_distribution(g: Graph, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Stationary law of ``P`` by power iteration on the lazy chain ``(I + P) / 2``.

    The lazy chain shares the stationary vector and is aperiodic, so periodic
    graphs (bipartite ones, for instance) converge geometrically.
    """
    if not _unique_closed_class(g):
        raise NonUniqueStationary("P has more than one closed communicating class")
    P = dense_transition(g)
    xi = np.full(g.n, 1.0 / g.n)
    tol = min(cfg.tolerance, 1e-14)
    for _ in range(cfg.max_iterations):
        nxt = 0.5 * (xi + xi @ P)
        nxt /= nxt.sum()
        delta = np.abs(nxt - xi).sum()
        xi = nxt
        if delta < tol:
            return xi
    raise NoConvergence("stationary distribution did not converge")


def laurent_terms(g: Graph, sigma: float, cfg: SolverConfig = DEFAULT_CONFIG) -> LaurentTerms:
    """Laurent coefficients for ``T0 = P``, ``T1 = D^sigma P`` (so ``T0 - a T1 = A P``)."""
    if g.n > DENSE_LIMIT:
        raise DenseOnly(f"n={g.n} exceeds dense limit {DENSE_LIMIT}")
    P = dense_transition(g)
    n = g.n
    xi = stationary_distribution(g, cfg)
    one = np.ones(n)
    pi_proj = np.outer(one, xi)
    H = scipy.linalg.inv(np.eye(n) - P + pi_proj) - pi_proj
    T1 = (g.out_weight ** float(sigma))[:, None] * P
    X_m1 = pi_proj / (xi @ T1 @ one)
    I = np.eye(n)
    X_0 = (I - X_m1 @ T1) @ H @ (I - T1 @ X_m1)
    return LaurentTerms(xi=xi, H=H, X_minus1=X_m1, X_0=X_0, T1=T1, sigma=float(sigma))


def laurent_remainder(g: Graph, terms: LaurentTerms, a: float) -> float:
    """Max-abs entry of ``[I - A P]^{-1} - X_minus1 / a - X_0`` for the degree-power model."""
    m = degree_power_model(g, a, terms.sigma)
    exact = solvers.expected_visits_matrix(g, m)
    return float(np.abs(exact - terms.approximation(a)).max())


@dataclass(frozen=True, eq=False)
class DegreePowerLimits:
    pi_limit: np.ndarray
    rho_limit: np.ndarray
    restart_time_coeff: float

    def __iter__(self):
        return iter((self.pi_limit, self.rho_limit, self.restart_time_coeff))


def degree_power_asymptotics(g: Graph, sigma: float) -> DegreePowerLimits:
    """Limits as ``a -> 0`` of pi, rho and ``a * (expected restart time)`` for
    restart probabilities ``a d_i^sigma`` on an undirected graph."""
    _require_symmetric(g)
    d = np.asarray(g.out_weight, dtype=float)
    d_up = d ** (1.0 + float(sigma))
    return DegreePowerLimits(d / d.sum(), d_up / d_up.sum(), float(d.sum() / d_up.sum()))
