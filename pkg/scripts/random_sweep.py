"""Sweep random strongly connected instances and tally every FSN guarantee.

Checks per instance: reachability from the leaders, rate improvement, agreement
of the data-driven selection with the eigenvector rule, and (single leader)
spanning-tree validity.  Undecided-by-data edges are counted separately.
"""

import argparse
import random
import time
from collections import Counter

from fsnkit.fsn import clfn_fsn, dlfn_fsn, rate_report_clfn, rate_report_dlfn, verify_lf_reachability
from fsnkit.graph import LeaderProfile, random_strongly_connected
from fsnkit.spantree import build_spanning_tree, verify_spanning_tree
from fsnkit.tempo import run_distributed_selection


def instance(seed, n_max, max_leaders):
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    net = random_strongly_connected(n, rng.uniform(0.05, 0.5), seed)
    leaders = rng.sample(range(1, n + 1), rng.randint(1, min(n, max_leaders)))
    return net, LeaderProfile.from_leaders(n, leaders, 0.1)


def check(seed, args, tally):
    net, leaders = instance(seed, args.n_max, args.max_leaders)
    for mode in ("continuous", "discrete"):
        g = net if mode == "continuous" else net.with_self_loops()
        fsn = clfn_fsn(g, leaders) if mode == "continuous" else dlfn_fsn(g, leaders)
        tally[f"{mode}/reachability_fail"] += not verify_lf_reachability(fsn, leaders)
        try:
            (rate_report_clfn if mode == "continuous" else rate_report_dlfn)(g, leaders, fsn)
        except AssertionError:
            tally[f"{mode}/rate_fail"] += 1
        if args.distributed:
            sel = run_distributed_selection(net, leaders, mode, eps=args.eps)
            und = set(sel.undecided)
            tally[f"{mode}/undecided_edges"] += len(und)
            diff = any(
                {j for j in sel.reduced_sets[i] if (i, j) not in und}
                != {j for j in fsn.reduced_neighbor_sets[i] if (i, j) not in und}
                for i in net.nodes
            )
            tally[f"{mode}/distributed_mismatch"] += diff
        if len(leaders.leaders) == 1:
            tree = build_spanning_tree(fsn, leaders, "seeded-random", seed)
            tally[f"{mode}/tree_invalid"] += not verify_spanning_tree(tree, net.n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--max-leaders", type=int, default=3)
    ap.add_argument("--eps", type=float, default=1e-8, help="termination threshold for the data-driven agents")
    ap.add_argument("--no-distributed", dest="distributed", action="store_false")
    args = ap.parse_args()
    tally = Counter()
    t0 = time.perf_counter()
    for seed in range(args.start, args.start + args.count):
        check(seed, args, tally)
    print(f"{args.count} instances in {time.perf_counter() - t0:.1f} s")
    keys = sorted({k for k in tally} | {f"{m}/{c}" for m in ("continuous", "discrete")
                                        for c in ("reachability_fail", "rate_fail", "tree_invalid")})
    for k in keys:
        print(f"  {k:36s} {tally[k]}")


if __name__ == "__main__":
    main()
