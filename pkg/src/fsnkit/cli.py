"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fixtures
from .dynamics import DEFAULT_H, DEFAULT_SEED, Trajectory, default_x0, settling_time, simulate_clfn, simulate_dlfn
from .fsn import RATIO_TOL, clfn_fsn, dlfn_fsn, rate_report_clfn, rate_report_dlfn, verify_lf_reachability
from .graph import (
    DirectedNetwork,
    LeaderProfile,
    LeaderSchedule,
    NetworkError,
    load_leaders,
    load_network,
    load_schedule,
    parse_leader_spec,
    random_strongly_connected,
    save_network,
)
from .spantree import POLICIES, build_spanning_tree, load_tree, tree_result_from, verify_spanning_tree
from .spectral import ConvergenceError, clfn_perron, dlfn_perron, laplacian_rate, stochastic_rate
from .tempo import DEFAULT_EPS, DEFAULT_GUARD, SelectionError, run_distributed_selection

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    network: str = "g7"
    leaders: str | None = None
    input_value: float | None = None
    mode: str = "continuous"
    h: float = DEFAULT_H
    t_end: float = 60.0
    k_end: int = 300
    eps: float = DEFAULT_EPS
    ratio_tol: float = RATIO_TOL
    guard: float = DEFAULT_GUARD
    seed: int = DEFAULT_SEED
    out: str = "out"
    schedule: str | None = None
    policy: str = "smallest-index"
    source: str = "distributed"
    tree: str | None = None
    n: int = 7
    p: float = 0.2

    def load_network(self) -> DirectedNetwork:
        if self.network == "g7":
            net = fixtures.g7()
        else:
            net = load_network(self.network)
        # discrete mode always runs with unit self-loops where none are given
        return net.with_self_loops() if self.mode == "discrete" else net

    def load_leaders(self, n: int) -> LeaderProfile:
        if self.leaders is None:
            if self.network != "g7":
                raise NetworkError("--leaders is required for a custom network")
            profile = fixtures.g7_leaders()
        elif os.path.isfile(self.leaders):
            profile = load_leaders(self.leaders, n)
        else:
            profile = parse_leader_spec(self.leaders, n, 0.1)
        if self.input_value is not None:
            profile = LeaderProfile(profile.delta, self.input_value)
        return profile

    def load_schedule(self, n: int) -> LeaderSchedule | None:
        if self.schedule is None:
            return None
        if self.schedule == "switching":
            return fixtures.switch_scenario()
        return load_schedule(self.schedule, n)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _fsn_for(cfg: RunConfig, net: DirectedNetwork, leaders: LeaderProfile):
    if cfg.mode == "discrete":
        return dlfn_fsn(net, leaders, cfg.ratio_tol)
    return clfn_fsn(net, leaders, cfg.ratio_tol)


def cmd_analyze(cfg: RunConfig) -> list[Path]:
    net = cfg.load_network()
    leaders = cfg.load_leaders(net.n)
    if cfg.mode == "discrete":
        pair = dlfn_perron(net, leaders)
        fsn = dlfn_fsn(net, leaders, cfg.ratio_tol)
        rates = rate_report_dlfn(net, leaders, fsn)
    else:
        pair = clfn_perron(net, leaders)
        fsn = clfn_fsn(net, leaders, cfg.ratio_tol)
        rates = rate_report_clfn(net, leaders, fsn)
    reach = verify_lf_reachability(fsn, leaders)
    data = fsn.to_dict()
    data.update(
        mode=cfg.mode,
        leaders=sorted(leaders.leaders),
        lambda_orig=rates.lambda_orig,
        lambda_fsn=rates.lambda_fsn,
        improved=rates.improved,
        residual=pair.residual,
        reachability={"ok": reach.ok, "unreachable": sorted(reach.unreachable)},
    )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"analysis_{cfg.mode}.json"
    _write_json(path, data)
    print(f"lambda original {rates.lambda_orig:.6f}, FSN {rates.lambda_fsn:.6f}")
    print("eigenvector", " ".join(f"{x:.4f}" for x in pair.vector))
    print("kept arrows", " ".join(f"{e.sender}->{e.receiver}" for e in fsn.kept))
    return [path]


def _gij_rows(traj: Trajectory, net: DirectedNetwork):
    start = 1 if traj.mode == "discrete" else 0
    for k in range(start, len(traj)):
        r = traj.rates[k]
        for i, j in net.edges():
            if r[j - 1] != 0.0:
                yield k, i, j, abs(r[i - 1]) / abs(r[j - 1])


def _write_gij(path: Path, traj: Trajectory, net: DirectedNetwork) -> None:
    with open(path, "w") as fh:
        fh.write("tick,i,j,g\n")
        for k, i, j, g in _gij_rows(traj, net):
            fh.write(f"{k},{i},{j},{float(g)!r}\n")


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    net = cfg.load_network()
    schedule = cfg.load_schedule(net.n)
    if schedule is None:
        leaders = cfg.load_leaders(net.n)
        end = cfg.k_end if cfg.mode == "discrete" else cfg.t_end
        schedule = LeaderSchedule.constant(leaders, end)
    x0 = default_x0(net.n, cfg.seed)
    fsns = [_fsn_for(cfg, net, p).reduced for _, _, p in schedule.segments]
    if cfg.mode == "discrete":
        runs = {
            "original": (net, simulate_dlfn(net, schedule, x0)),
            "fsn": (fsns[0], simulate_dlfn(net, schedule, x0, networks=fsns)),
        }
    else:
        runs = {
            "original": (net, simulate_clfn(net, schedule, x0, cfg.h)),
            "fsn": (fsns[0], simulate_clfn(net, schedule, x0, cfg.h, networks=fsns)),
        }
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    summary = {"mode": cfg.mode, "seed": cfg.seed, "x0": [float(x) for x in x0]}
    for name, (g, traj) in runs.items():
        p = out / f"trajectory_{name}_{cfg.mode}.csv"
        traj.to_csv(p)
        q = out / f"gij_{name}_{cfg.mode}.csv"
        _write_gij(q, traj, g)
        written += [p, q]
        summary[f"settling_time_{name}"] = settling_time(traj, 1e-3)
        summary[f"final_deviation_{name}"] = float(traj.deviation()[-1])
    path = out / f"simulate_{cfg.mode}.json"
    _write_json(path, summary)
    print(f"settling time (1e-3 band): original {summary['settling_time_original']}, FSN {summary['settling_time_fsn']}")
    return written + [path]


def cmd_select(cfg: RunConfig) -> list[Path]:
    net = cfg.load_network()
    leaders = cfg.load_leaders(net.n)
    result = run_distributed_selection(
        net, leaders, cfg.mode, cfg.eps, cfg.guard, cfg.h, default_x0(net.n, cfg.seed), record=True
    )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"selection_{cfg.mode}.json"
    data = result.to_dict()
    data["undecided_edges"] = [[j, i] for i, j in result.undecided]
    _write_json(path, data)
    hist = out / f"selection_gij_{cfg.mode}.csv"
    result.history_to_csv(hist)
    for i, js in result.reduced_sets.items():
        print(f"N_{i}^FSN = {sorted(js)}  (terminated at tick {result.termination_ticks[i]})")
    return [path, hist]


def cmd_spantree(cfg: RunConfig) -> list[Path]:
    net = cfg.load_network()
    leaders = cfg.load_leaders(net.n)
    if cfg.source == "distributed":
        sel = run_distributed_selection(
            net, leaders, cfg.mode, cfg.eps, cfg.guard, cfg.h, default_x0(net.n, cfg.seed)
        )
        reduced = sel.reduced_network()
        fsn = _fsn_for(cfg, net, leaders)
        if reduced != fsn.reduced:
            raise ConvergenceError("data-driven selection disagrees with the eigenvector FSN")
    else:
        fsn = _fsn_for(cfg, net, leaders)
    result = build_spanning_tree(fsn, leaders, cfg.policy, cfg.seed)
    report = verify_spanning_tree(result, net.n)
    if not report.ok:
        raise ConvergenceError("; ".join(report.violations))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"spantree_{cfg.mode}.edges"
    path.write_text(result.to_text())
    rate = laplacian_rate if cfg.mode == "continuous" else stochastic_rate
    info = {
        "root": result.root,
        "parent": {str(i): j for i, j in sorted(result.parent.items())},
        "removed_arrows": [[j, i] for i, j in result.removed],
        "lambda_tree": rate(result.tree if cfg.mode == "continuous" else result.tree.with_self_loops(), leaders),
        "lambda_fsn": rate(fsn.reduced, leaders),
        "verified": report.ok,
    }
    meta = out / f"spantree_{cfg.mode}.json"
    _write_json(meta, info)
    print(f"spanning tree rooted at {result.root}: " + " ".join(f"{j}->{i}" for i, j in sorted(result.parent.items())))
    return [path, meta]


def cmd_gen(cfg: RunConfig) -> list[Path]:
    net = random_strongly_connected(cfg.n, cfg.p, cfg.seed)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"random_n{cfg.n}_seed{cfg.seed}.edges"
    save_network(net, path)
    print(path)
    return [path]


def cmd_verify(cfg: RunConfig) -> list[Path]:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.tree:
        tree, root = load_tree(cfg.tree)
        report = verify_spanning_tree(tree_result_from(tree, root), tree.n)
        data = {"tree": cfg.tree, "ok": report.ok, "violations": report.violations}
        ok = report.ok
    else:
        net = cfg.load_network()
        leaders = cfg.load_leaders(net.n)
        fsn = _fsn_for(cfg, net, leaders)
        reach = verify_lf_reachability(fsn, leaders)
        report_fn = rate_report_dlfn if cfg.mode == "discrete" else rate_report_clfn
        rates = report_fn(net, leaders, fsn)
        data = {
            "mode": cfg.mode,
            "reachable": reach.ok,
            "unreachable": sorted(reach.unreachable),
            "edges_removed": len(fsn.removed),
            "lambda_orig": rates.lambda_orig,
            "lambda_fsn": rates.lambda_fsn,
            "improved": rates.improved,
        }
        ok = reach.ok
    path = out / "verify.json"
    _write_json(path, data)
    print("OK" if ok else "FAILED")
    if not ok and cfg.tree:
        raise NetworkError("tree verification failed: " + "; ".join(data["violations"]))
    if not ok:
        raise ConvergenceError("verification failed")
    return [path]


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "select": cmd_select,
    "spantree": cmd_spantree,
    "gen": cmd_gen,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--network", default="g7", help="edge-list file, or 'g7' for the bundled example")
    common.add_argument("--leaders", help="inline 'i:delta,...' list or a leader file (default: G7 leaders {1,5})")
    common.add_argument("--input", dest="input_value", type=float, help="homogeneous input level u0")
    common.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    common.add_argument("--h", type=float, default=DEFAULT_H, help="RK4 step size")
    common.add_argument("--t-end", type=float, default=60.0)
    common.add_argument("--k-end", type=int, default=300)
    common.add_argument("--eps", type=float, default=DEFAULT_EPS, help="termination threshold per agent")
    common.add_argument("--ratio-tol", type=float, default=RATIO_TOL)
    common.add_argument("--guard", type=float, default=DEFAULT_GUARD)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", default="out", help="output directory")

    parser = argparse.ArgumentParser(prog="fsnkit", description="FSN neighbor selection for leader-follower networks")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="eigenpair, FSN edges, reachability")
    p = sub.add_parser("simulate", parents=[common], help="trajectories and g_ij series, original vs FSN")
    p.add_argument("--schedule", help="leader schedule file, or 'switching' for the bundled scenario")
    sub.add_parser("select", parents=[common], help="data-driven distributed neighbor selection")
    p = sub.add_parser("spantree", parents=[common], help="distributed spanning tree (single leader)")
    p.add_argument("--policy", choices=POLICIES, default="smallest-index")
    p.add_argument("--source", choices=("distributed", "centralized"), default="distributed")
    p = sub.add_parser("gen", parents=[common], help="random strongly connected instance")
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--p", type=float, default=0.2)
    p = sub.add_parser("verify", parents=[common], help="check FSN reachability and rates, or a spanning-tree file")
    p.add_argument("--tree", help="tree file ('root <id>' + edge list)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        COMMANDS[cfg.command](cfg)
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, SelectionError, AssertionError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
