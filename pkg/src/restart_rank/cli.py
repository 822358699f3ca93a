"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import identities, montecarlo, solvers
from .errors import InputError, NotUndirected, SolverError, StabilityViolation
from .graph import Graph, check_weak_connectivity, read_edge_list
from .restart import RestartModel, degree_power_model, load_restart_config, model_from_config
from .solvers import Mode, SolverConfig

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _natural_key(label):
    s = str(label)
    return (0, int(s), s) if re.fullmatch(r"-?\d+", s) else (1, 0, s)


@dataclass
class RankTable:
    rows: list[tuple[int, object, float, float]]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def build(cls, g: Graph, pi, rho, sort_by: str = "pi", metadata=None) -> "RankTable":
        score = pi if sort_by == "pi" else rho
        # scores equal to 12 decimals count as ties so round-off cannot reorder them
        order = sorted(range(g.n), key=lambda i: (-round(float(score[i]), 12), _natural_key(g.label(i))))
        rows = [(r, g.label(i), float(pi[i]), float(rho[i])) for r, i in enumerate(order, start=1)]
        return cls(rows, dict(metadata or {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "node", "pi", "rho"])
        for rank, label, pi, rho in self.rows:
            w.writerow([rank, label, fmt(pi), fmt(rho)])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{"rank": r, "node": lab, "pi": pi, "rho": rho} for r, lab, pi, rho in self.rows]
        return json.dumps({"metadata": self.metadata, "rows": rows}, indent=2) + "\n"


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list: {text!r}") from None


def _load(args) -> tuple[Graph, RestartModel]:
    g = read_edge_list(args.graph, undirected=args.undirected)
    if not check_weak_connectivity(g):
        print("warning: graph is not weakly connected", file=sys.stderr)
    return g, load_restart_config(args.config, g)


def _solver_config(args) -> SolverConfig:
    if args.command == "verify":
        return SolverConfig(mode=Mode(args.mode))
    return SolverConfig(tolerance=args.tol, mode=Mode(args.mode))


# ---------------------------------------------------------------- subcommands


def cmd_rank(args) -> tuple[int, str]:
    g, m = _load(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    pi = solvers.occupation_ppr(g, m, cfg)
    t1 = time.perf_counter()
    rho = solvers.location_ppr(g, m, cfg)
    t2 = time.perf_counter()
    meta = {
        "model": m.kind.value,
        "params": {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in m.params.items()},
        "solver": pi.method.value,
        "residual_pi": pi.residual,
        "residual_rho": rho.residual,
        "seconds_pi": t1 - t0,
        "seconds_rho": t2 - t1,
        "nodes": g.n,
    }
    table = RankTable.build(g, pi.values, rho.values, args.sort, meta)
    return EXIT_OK, table.to_json() if args.format == "json" else table.to_csv()


def _verify_results(g, m, cfg, tol):
    results = []

    def record(name, dev, detail=""):
        status = "PASS" if dev <= tol else "FAIL"
        results.append({"check": name, "max_abs_deviation": dev, "status": status, "detail": detail})

    record("rho_pi_relation", identities.rho_pi_relation_check(g, m, cfg))

    skip = None
    if not g.is_symmetric:
        skip = "graph is not undirected"
    elif m.alpha.min() <= 0 or m.alpha.max() >= 1:
        skip = "alpha must lie strictly inside (0, 1)"
    for name, check in (
        ("occupation_symmetry", identities.check_occupation_symmetry),
        ("location_symmetry", identities.check_location_symmetry),
    ):
        if skip:
            results.append({"check": name, "max_abs_deviation": None, "status": "SKIPPED", "detail": skip})
            continue
        rep = check(g, m, cfg)
        record(name, rep.max_abs_deviation, f"worst_pair={g.label(rep.worst_pair[0])}:"
               f"{g.label(rep.worst_pair[1])} pairs={rep.pairs_checked}")
    return results


def cmd_verify(args) -> tuple[int, str]:
    g, m = _load(args)
    results = _verify_results(g, m, _solver_config(args), args.tol)
    failed = any(r["status"] == "FAIL" for r in results)
    if args.format == "json":
        text = json.dumps({"tolerance": args.tol, "checks": results}, indent=2) + "\n"
    else:
        rows = [
            [r["check"], "" if r["max_abs_deviation"] is None else fmt(r["max_abs_deviation"]),
             fmt(args.tol), r["status"], r["detail"]]
            for r in results
        ]
        text = _write_csv(["check", "max_abs_deviation", "tolerance", "status", "detail"], rows)
    return (EXIT_VERIFY_FAILED if failed else EXIT_OK), text


def cmd_simulate(args) -> tuple[int, str]:
    g, m = _load(args)
    cfg = _solver_config(args)
    pi = solvers.occupation_ppr(g, m, cfg).values
    rho = solvers.location_ppr(g, m, cfg).values
    stats = montecarlo.simulate(g, m, args.steps, args.seed)
    emp_pi = montecarlo.empirical_pi(stats).values
    emp_rho = montecarlo.empirical_rho(stats).values
    frac = montecarlo.restart_fraction(stats)
    frac_exact = float(np.dot(1.0 - m.alpha, pi))

    if args.stats_out:
        with open(args.stats_out, "w", encoding="utf-8") as fh:
            fh.write(stats.to_json())

    if args.format == "json":
        comparison = [
            {
                "node": g.label(i),
                "empirical_pi": float(emp_pi[i]), "exact_pi": float(pi[i]),
                "abs_dev_pi": float(abs(emp_pi[i] - pi[i])),
                "empirical_rho": float(emp_rho[i]), "exact_rho": float(rho[i]),
                "abs_dev_rho": float(abs(emp_rho[i] - rho[i])),
            }
            for i in range(g.n)
        ]
        doc = {
            "stats": stats.to_dict(),
            "comparison": comparison,
            "restart_fraction": {"empirical": frac, "exact": frac_exact, "abs_dev": abs(frac - frac_exact)},
        }
        return EXIT_OK, json.dumps(doc, indent=2) + "\n"

    rows = []
    for name, emp, exact in (("pi", emp_pi, pi), ("rho", emp_rho, rho)):
        rows += [[name, g.label(i), fmt(emp[i]), fmt(exact[i]), fmt(abs(emp[i] - exact[i]))] for i in range(g.n)]
    rows.append(["restart_fraction", "", fmt(frac), fmt(frac_exact), fmt(abs(frac - frac_exact))])
    return EXIT_OK, _write_csv(["quantity", "node", "empirical", "exact", "abs_dev"], rows)


def cmd_asymptotics(args) -> tuple[int, str]:
    g = read_edge_list(args.graph, undirected=args.undirected)
    if not g.is_symmetric:
        raise NotUndirected("asymptotics need an undirected graph (pass --undirected)")
    v = model_from_config(g, {"kind": "custom", "alpha": [0.0] * g.n, "v": args.v}).v
    cfg = _solver_config(args)
    limits = identities.degree_power_asymptotics(g, args.sigma)
    terms = identities.laurent_terms(g, args.sigma, cfg)

    rows = []
    prev = None
    for a in args.a_grid:
        try:
            m = degree_power_model(g, a, args.sigma, v)
        except (StabilityViolation, InputError):
            rows.append({"a": a, "status": "REJECTED"})
            continue
        pi = solvers.occupation_ppr(g, m, cfg).values
        rho = solvers.location_ppr(g, m, cfg).values
        row = {
            "a": a,
            "status": "OK",
            "pi_error": float(np.abs(pi - limits.pi_limit).max()),
            "rho_error": float(np.abs(rho - limits.rho_limit).max()),
            "a_restart_time": a * solvers.expected_restart_time(g, m, v, cfg),
            "restart_time_coeff": limits.restart_time_coeff,
            "laurent_remainder": identities.laurent_remainder(g, terms, a),
        }
        for key in ("pi_error", "rho_error"):
            ratio = None
            if prev is not None and prev[key] > 0:
                ratio = row[key] / prev[key]
            row[key.replace("error", "ratio")] = ratio
        rows.append(row)
        prev = row

    if args.format == "json":
        return EXIT_OK, json.dumps({"sigma": args.sigma, "rows": rows}, indent=2) + "\n"
    header = ["a", "status", "pi_error", "pi_ratio", "rho_error", "rho_ratio",
              "a_restart_time", "restart_time_coeff", "laurent_remainder"]
    out = []
    for r in rows:
        out.append(["" if r.get(h) is None else (r[h] if h == "status" else fmt(r[h])) for h in header])
    return EXIT_OK, _write_csv(header, out)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, metavar="FILE", help="edge list: 'src dst [weight]' per line")
    common.add_argument("--undirected", action="store_true", help="read each edge as two opposite arcs")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--mode", choices=[m.value for m in Mode], default="auto")
    common.add_argument("--output", metavar="FILE", help="write to FILE instead of stdout")

    parser = argparse.ArgumentParser(
        prog="restart-rank",
        description="Personalized PageRank with node-dependent restart probabilities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common], help="rank nodes by pi and rho")
    p.add_argument("--config", required=True, metavar="FILE", help="restart config (JSON)")
    p.add_argument("--sort", choices=["pi", "rho"], default="pi")
    p.add_argument("--tol", type=float, default=1e-12, help="iterative solver tolerance")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("verify", parents=[common], help="check the identities on this graph")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--tol", type=float, default=1e-9, help="max deviation counted as PASS")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo walk vs exact scores")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--steps", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stats-out", metavar="FILE", help="also write WalkStats JSON here")
    p.add_argument("--tol", type=float, default=1e-12, help="iterative solver tolerance")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("asymptotics", parents=[common], help="small-a behaviour of degree-power restart")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--a-grid", type=_float_list, default=[1e-2, 5e-3, 2.5e-3, 1.25e-3])
    p.add_argument("--v", default="uniform", help="restart distribution: uniform or node:<label>")
    p.add_argument("--tol", type=float, default=1e-12, help="iterative solver tolerance")
    p.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
