"""Monte Carlo simulation of the restart walk.

Random numbers come from numpy's PCG64. A single walker seeded with ``s``
uses ``PCG64(s)``. Parallel walkers derived from one master seed use the
64-bit seeds ``SeedSequence(master).generate_state(k, uint64)``, one per
walker, so the split is reproducible and independent of scheduling.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .errors import NoRestartsObserved
from .graph import Graph
from .restart import RestartModel
from .solvers import Method, ScoreVector

_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class WalkStats:
    steps: int
    occupation_counts: np.ndarray
    pre_restart_counts: np.ndarray
    restarts: int
    seeds: tuple[int, ...]

    def __eq__(self, other):
        if not isinstance(other, WalkStats):
            return NotImplemented
        return (
            self.steps == other.steps
            and self.restarts == other.restarts
            and self.seeds == other.seeds
            and np.array_equal(self.occupation_counts, other.occupation_counts)
            and np.array_equal(self.pre_restart_counts, other.pre_restart_counts)
        )

    def merge(self, other: "WalkStats") -> "WalkStats":
        return WalkStats(
            steps=self.steps + other.steps,
            occupation_counts=self.occupation_counts + other.occupation_counts,
            pre_restart_counts=self.pre_restart_counts + other.pre_restart_counts,
            restarts=self.restarts + other.restarts,
            seeds=tuple(sorted(self.seeds + other.seeds)),
        )

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "restarts": self.restarts,
            "seeds": list(self.seeds),
            "occupation_counts": self.occupation_counts.tolist(),
            "pre_restart_counts": self.pre_restart_counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WalkStats":
        return cls(
            steps=int(d["steps"]),
            occupation_counts=np.asarray(d["occupation_counts"], dtype=np.int64),
            pre_restart_counts=np.asarray(d["pre_restart_counts"], dtype=np.int64),
            restarts=int(d["restarts"]),
            seeds=tuple(int(s) for s in d["seeds"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _cumulative(weights) -> list[float]:
    cum = list(accumulate(float(w) for w in weights))
    total = cum[-1]
    return [c / total for c in cum]


def simulate(g: Graph, m: RestartModel, steps: int, seed: int) -> WalkStats:
    """Run the restart walk for ``steps`` transitions.

    The start node is drawn from ``v``. Before every transition the walker at
    ``i`` restarts with probability ``1 - alpha_i`` (counting a pre-restart
    visit at ``i``) and jumps to a draw from ``v``; otherwise it follows row
    ``i`` of ``P``. Each arrival counts as one occupation visit.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    m.check_dims(g)
    rng = np.random.Generator(np.random.PCG64(seed))
    n = g.n

    W = g.W
    nbrs = [W.indices[W.indptr[i]:W.indptr[i + 1]].tolist() for i in range(n)]
    cdfs = [_cumulative(W.data[W.indptr[i]:W.indptr[i + 1]]) for i in range(n)]
    v_support = np.flatnonzero(m.v).tolist()
    v_cdf = _cumulative(m.v[v_support])
    alpha = m.alpha.tolist()

    occ = [0] * n
    pre = [0] * n
    restarts = 0

    def pick(cdf, u):
        # guard against u landing past a cdf that sums to 1 - eps
        return min(bisect_right(cdf, u), len(cdf) - 1)

    node = v_support[pick(v_cdf, rng.random())]
    done = 0
    while done < steps:
        batch = min(_CHUNK, steps - done)
        coin = rng.random(batch).tolist()
        dest = rng.random(batch).tolist()
        for c, u in zip(coin, dest):
            if c >= alpha[node]:
                pre[node] += 1
                restarts += 1
                node = v_support[pick(v_cdf, u)]
            else:
                node = nbrs[node][pick(cdfs[node], u)]
            occ[node] += 1
        done += batch

    return WalkStats(
        steps=steps,
        occupation_counts=np.array(occ, dtype=np.int64),
        pre_restart_counts=np.array(pre, dtype=np.int64),
        restarts=restarts,
        seeds=(int(seed),),
    )


def walker_seeds(master_seed: int, walkers: int) -> list[int]:
    state = np.random.SeedSequence(master_seed).generate_state(walkers, dtype=np.uint64)
    return [int(s) for s in state]


def merge_stats(stats) -> WalkStats:
    stats = list(stats)
    out = stats[0]
    for s in stats[1:]:
        out = out.merge(s)
    return out


def simulate_parallel(
    g: Graph, m: RestartModel, steps_per_walker: int, master_seed: int, walkers: int, processes: int = 1
) -> WalkStats:
    """Independent walkers on split seeds, merged fieldwise."""
    seeds = walker_seeds(master_seed, walkers)
    if processes <= 1:
        return merge_stats(simulate(g, m, steps_per_walker, s) for s in seeds)
    with ProcessPoolExecutor(max_workers=processes) as pool:
        futures = [pool.submit(simulate, g, m, steps_per_walker, s) for s in seeds]
        return merge_stats(f.result() for f in futures)


def _std_error(p: np.ndarray, count: int) -> float:
    # binomial standard error of the worst node; ignores walk autocorrelation
    return float(np.sqrt((p * (1.0 - p)).max() / count))


def empirical_pi(stats: WalkStats) -> ScoreVector:
    values = stats.occupation_counts / stats.steps
    return ScoreVector(values, Method.MONTE_CARLO, _std_error(values, stats.steps))


def empirical_rho(stats: WalkStats) -> ScoreVector:
    if stats.restarts == 0:
        raise NoRestartsObserved("no restarts in the simulated walk")
    values = stats.pre_restart_counts / stats.restarts
    return ScoreVector(values, Method.MONTE_CARLO, _std_error(values, stats.restarts))


def restart_fraction(stats: WalkStats) -> float:
    return stats.restarts / stats.steps
