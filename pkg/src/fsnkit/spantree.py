"""Distributed directed spanning tree from a single-leader FSN network.

Every agent with more than one FSN in-neighbor keeps one of them and drops
the rest.  Any choice works; ``smallest-index`` is the reproducible default.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Mapping

from .fsn import FsnResult
from .graph import DirectedNetwork, LeaderProfile, NetworkError, format_network, parse_network, reachable_set

POLICIES = ("smallest-index", "seeded-random")


@dataclass(frozen=True)
class SpanningTreeResult:
    tree: DirectedNetwork
    root: int
    parent: dict[int, int]  # chosen in-neighbor j* per non-root node
    removed: tuple[tuple[int, int], ...]  # (receiver, sender) edges dropped from the FSN

    def to_text(self) -> str:
        return format_network(self.tree, header=[f"root {self.root}"])


def choose_parent(i: int, candidates, policy: str = "smallest-index", rng: random.Random | None = None) -> int:
    """One agent's local decision; sees only its own FSN in-neighborhood."""
    candidates = sorted(candidates)
    if policy == "smallest-index":
        return candidates[0]
    if policy == "seeded-random":
        return (rng or random.Random(i)).choice(candidates)
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def build_spanning_tree(
    fsn: FsnResult,
    leaders: LeaderProfile,
    policy: str = "smallest-index",
    seed: int = 0,
    choices: Mapping[int, int] | None = None,
) -> SpanningTreeResult:
    """``choices`` pins j* for specific agents (it must be one of their FSN in-neighbors)."""
    if len(leaders.leaders) != 1:
        raise NetworkError(f"spanning tree construction needs exactly one leader, got {sorted(leaders.leaders)}")
    (root,) = leaders.leaders
    reduced = fsn.reduced
    leaders.check(reduced)
    choices = dict(choices or {})
    rng = random.Random(seed)
    parent: dict[int, int] = {}
    removed = []
    for i in reduced.nodes:
        nbrs = reduced.in_neighbors[i]
        if i == root:
            if nbrs:
                raise NetworkError(f"leader {root} kept in-neighbors {list(nbrs)}; not a single-leader FSN")
            continue
        if not nbrs:
            raise NetworkError(f"follower {i} has no FSN in-neighbor; FSN input is corrupted")
        if i in choices:
            if choices[i] not in nbrs:
                raise NetworkError(f"pinned parent {choices[i]} is not an FSN in-neighbor of {i}")
            j_star = choices[i]
        else:
            j_star = choose_parent(i, nbrs, policy, rng)
        parent[i] = j_star
        removed.extend((i, j) for j in nbrs if j != j_star)
    # discrete self-loops are update weights, not tree edges
    tree = reduced.restricted_to((i, j) for i, j in parent.items()).without_self_loops()
    return SpanningTreeResult(tree, root, parent, tuple(removed))


@dataclass
class TreeReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_spanning_tree(result: SpanningTreeResult, n: int) -> TreeReport:
    """Check degrees, edge count, acyclicity and reachability from the root independently."""
    tree, root = result.tree, result.root
    problems = []
    if tree.n != n:
        return TreeReport(False, [f"tree has {tree.n} nodes, expected {n}"])
    edges = list(tree.weights)
    loops = [(i, j) for (i, j) in edges if i == j]
    if loops:
        problems.append(f"self-loop/cycle at {loops}")
    indeg = {i: 0 for i in range(1, n + 1)}
    for i, _ in edges:
        indeg[i] += 1
    if indeg.get(root, 0) != 0:
        problems.append(f"root {root} has in-degree {indeg[root]}")
    bad = [i for i, d in indeg.items() if i != root and d != 1]
    if bad:
        problems.append(f"non-root nodes without exactly one in-neighbor: {bad}")
    if len(edges) != n - 1:
        problems.append(f"{len(edges)} edges, expected {n - 1}")
    cyclic = _cyclic_nodes(edges, n)
    if cyclic:
        problems.append(f"self-loop/cycle among nodes {cyclic}")
    if 1 <= root <= tree.n:
        plain = DirectedNetwork(tree.n, {e: w for e, w in tree.weights.items() if e[0] != e[1]})
        missing = sorted(set(range(1, n + 1)) - reachable_set(plain, [root]))
        if missing:
            problems.append(f"nodes unreachable from root {root}: {missing}")
    else:
        problems.append(f"root {root} is not a node")
    return TreeReport(not problems, problems)


def _cyclic_nodes(edges, n: int) -> list[int]:
    """Nodes left over after Kahn's topological peeling (empty iff acyclic)."""
    indeg = {v: 0 for v in range(1, n + 1)}
    out: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        indeg[i] += 1
        out[j].append(i)
    queue = [v for v, d in indeg.items() if d == 0]
    while queue:
        j = queue.pop()
        for i in out[j]:
            indeg[i] -= 1
            if indeg[i] == 0:
                queue.append(i)
    return sorted(v for v, d in indeg.items() if d > 0)


def load_tree(path: str | os.PathLike) -> tuple[DirectedNetwork, int]:
    """Read a tree file: the edge-list format plus a ``root <id>`` line."""
    with open(path) as fh:
        text = fh.read()
    root = None
    body = []
    for line in text.splitlines():
        parts = line.split("#", 1)[0].split()
        if parts and parts[0] == "root":
            root = int(parts[1])
        else:
            body.append(line)
    if root is None:
        raise NetworkError(f"{path}: missing 'root <id>' line")
    return parse_network("\n".join(body), source=os.fspath(path)), root


def tree_result_from(tree: DirectedNetwork, root: int) -> SpanningTreeResult:
    parent = {i: js[0] for i, js in tree.in_neighbors.items() if len(js) == 1}
    return SpanningTreeResult(tree, root, parent, ())
