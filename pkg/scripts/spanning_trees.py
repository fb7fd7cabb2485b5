"""Spanning trees from single-leader FSNs of G7.

The tree depends on which FSN in-neighbor each agent keeps; ``--pin i:j``
forces agent i to keep j, any other choice follows ``--policy``.
"""

import argparse

from fsnkit import fixtures
from fsnkit.fsn import clfn_fsn
from fsnkit.graph import LeaderProfile
from fsnkit.spantree import POLICIES, build_spanning_tree, verify_spanning_tree
from fsnkit.spectral import laplacian_rate


def parse_pins(items):
    pins = {}
    for item in items:
        i, j = item.split(":")
        pins[int(i)] = int(j)
    return pins


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--leader", type=int, action="append", help="root leader (repeatable; default 1 and 6)")
    ap.add_argument("--policy", choices=POLICIES, default="smallest-index")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pin", nargs="*", default=[], help="forced choices such as 5:6")
    args = ap.parse_args()
    net = fixtures.g7()
    pins = parse_pins(args.pin)
    for leader in args.leader or [1, 6]:
        leaders = LeaderProfile.from_leaders(net.n, [leader], 0.1)
        fsn = clfn_fsn(net, leaders)
        multi = {i: js for i, js in fsn.reduced.in_neighbors.items() if len(js) > 1}
        choices = {i: j for i, j in pins.items() if i in multi}
        tree = build_spanning_tree(fsn, leaders, args.policy, args.seed, choices)
        report = verify_spanning_tree(tree, net.n)
        print(f"leader {leader}: agents with several FSN in-neighbors {multi}")
        print("  tree:", ", ".join(f"{j}->{i}" for i, j in sorted(tree.parent.items())))
        print(f"  valid: {report.ok}  lambda_1 FSN {laplacian_rate(fsn.reduced, leaders):.4f}, "
              f"tree {laplacian_rate(tree.tree, leaders):.4f}")


if __name__ == "__main__":
    main()
