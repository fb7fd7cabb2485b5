"""Directed network model, reachability, instance generation and text I/O.

Edges are stored receiver-first: ``(i, j)`` present means agent ``i`` listens
to agent ``j`` (``j`` is an in-neighbor of ``i``).  Text files and the
``arrows`` helpers use the sender -> receiver orientation of network drawings.
Node ids are 1-based.
"""

from __future__ import annotations

import os
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np


class NetworkError(ValueError):
    """Invalid network, leader profile or file contents."""


class ParseError(NetworkError):
    def __init__(self, path, lineno: int, msg: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {msg}")


@dataclass(frozen=True)
class DirectedNetwork:
    """Weighted digraph with in-neighbor semantics.

    ``weights[(i, j)] = w_ij > 0`` for every edge ``(i, j)``.  Self-loops are
    only accepted when ``self_loops`` is set (discrete-time use).
    """

    n: int
    weights: Mapping[tuple[int, int], float] = field(default_factory=dict)
    self_loops: bool = False

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise NetworkError(f"node count must be a positive integer, got {self.n!r}")
        clean = {}
        for key, w in dict(self.weights).items():
            i, j = int(key[0]), int(key[1])
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise NetworkError(f"edge ({i},{j}) references a node outside 1..{self.n}")
            w = float(w)
            if not (w > 0 and np.isfinite(w)):
                raise NetworkError(f"edge ({i},{j}) has non-positive weight {w}")
            if i == j and not self.self_loops:
                raise NetworkError(f"self-loop ({i},{i}) on a network not flagged for self-loops")
            clean[(i, j)] = w
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    @classmethod
    def from_arrows(cls, n: int, arrows: Iterable, self_loops: bool = False) -> "DirectedNetwork":
        """Build from ``(src, dst)`` or ``(src, dst, w)`` arrows; ``dst`` listens to ``src``."""
        weights: dict[tuple[int, int], float] = {}
        for arrow in arrows:
            src, dst = int(arrow[0]), int(arrow[1])
            w = float(arrow[2]) if len(arrow) > 2 else 1.0
            if (dst, src) in weights:
                raise NetworkError(f"duplicate edge {src}->{dst}")
            weights[(dst, src)] = w
        return cls(n, weights, self_loops)

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def in_neighbors(self) -> dict[int, tuple[int, ...]]:
        """N_i for each node, self excluded, sorted."""
        nbrs: dict[int, list[int]] = {i: [] for i in self.nodes}
        for i, j in self.weights:
            if i != j:
                nbrs[i].append(j)
        return {i: tuple(sorted(js)) for i, js in nbrs.items()}

    @cached_property
    def out_neighbors(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {i: [] for i in self.nodes}
        for i, j in self.weights:
            if i != j:
                nbrs[j].append(i)
        return {j: tuple(sorted(is_)) for j, is_ in nbrs.items()}

    @cached_property
    def in_degree(self) -> dict[int, float]:
        """d_i = sum of w_ij over all edges into i, self-loop included."""
        deg = {i: 0.0 for i in self.nodes}
        for (i, _), w in self.weights.items():
            deg[i] += w
        return deg

    def weight(self, i: int, j: int) -> float:
        return self.weights.get((i, j), 0.0)

    def self_loop(self, i: int) -> float:
        return self.weights.get((i, i), 0.0)

    def edges(self, include_self_loops: bool = False) -> list[tuple[int, int]]:
        """Sorted ``(receiver, sender)`` pairs."""
        return [e for e in self.weights if include_self_loops or e[0] != e[1]]

    def arrows(self, include_self_loops: bool = False) -> list[tuple[int, int, float]]:
        """Sorted ``(src, dst, w)`` triples."""
        out = [(j, i, w) for (i, j), w in self.weights.items() if include_self_loops or i != j]
        return sorted(out)

    @property
    def num_edges(self) -> int:
        return len(self.edges())

    def adjacency(self) -> np.ndarray:
        """Dense W with ``W[i-1, j-1] = w_ij`` (self-loops on the diagonal)."""
        W = np.zeros((self.n, self.n))
        for (i, j), w in self.weights.items():
            W[i - 1, j - 1] = w
        return W

    def laplacian(self) -> np.ndarray:
        """L = D - W; self-loops cancel out."""
        W = self.adjacency()
        return np.diag(W.sum(axis=1)) - W

    def with_self_loops(self, weight: float = 1.0) -> "DirectedNetwork":
        """Copy flagged for discrete use, with a loop of ``weight`` on every node lacking one."""
        weights = dict(self.weights)
        for i in self.nodes:
            weights.setdefault((i, i), weight)
        return DirectedNetwork(self.n, weights, self_loops=True)

    def without_self_loops(self) -> "DirectedNetwork":
        return DirectedNetwork(self.n, {e: w for e, w in self.weights.items() if e[0] != e[1]})

    def restricted_to(self, edges: Iterable[tuple[int, int]]) -> "DirectedNetwork":
        """Sub-network keeping only the given ``(receiver, sender)`` edges; self-loops always kept."""
        keep = set(edges)
        weights = {e: w for e, w in self.weights.items() if e in keep or e[0] == e[1]}
        missing = keep - set(self.weights)
        if missing:
            raise NetworkError(f"edges not in network: {sorted(missing)}")
        return DirectedNetwork(self.n, weights, self.self_loops)


@dataclass(frozen=True)
class LeaderProfile:
    """Influence weights delta_i >= 0 and the shared input level u_0."""

    delta: tuple[float, ...]
    input_value: float = 0.0

    def __post_init__(self):
        delta = tuple(float(d) for d in self.delta)
        if any(not np.isfinite(d) or d < 0 for d in delta):
            raise NetworkError("leader weights must be finite and non-negative")
        if not any(d > 0 for d in delta):
            raise NetworkError("no leader: at least one delta_i must be positive")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "input_value", float(self.input_value))

    @classmethod
    def from_leaders(cls, n: int, leaders, input_value: float = 0.0) -> "LeaderProfile":
        """``leaders`` is an iterable of node ids (delta = 1) or a ``{node: delta}`` map."""
        if not isinstance(leaders, Mapping):
            leaders = {int(i): 1.0 for i in leaders}
        delta = [0.0] * n
        for i, d in leaders.items():
            if not 1 <= int(i) <= n:
                raise NetworkError(f"leader {i} outside 1..{n}")
            delta[int(i) - 1] = float(d)
        return cls(tuple(delta), input_value)

    @property
    def n(self) -> int:
        return len(self.delta)

    @property
    def leaders(self) -> frozenset[int]:
        return frozenset(i + 1 for i, d in enumerate(self.delta) if d > 0)

    @property
    def followers(self) -> frozenset[int]:
        return frozenset(i + 1 for i, d in enumerate(self.delta) if d == 0)

    def as_array(self) -> np.ndarray:
        return np.array(self.delta)

    def check(self, net: DirectedNetwork) -> None:
        if self.n != net.n:
            raise NetworkError(f"leader profile has {self.n} entries, network has {net.n} nodes")


@dataclass(frozen=True)
class LeaderSchedule:
    """Piecewise-constant leader profiles over contiguous time intervals."""

    segments: tuple[tuple[float, float, LeaderProfile], ...]

    def __post_init__(self):
        segs = tuple((float(a), float(b), p) for a, b, p in self.segments)
        if not segs:
            raise NetworkError("schedule needs at least one segment")
        for k, (a, b, _) in enumerate(segs):
            if not b > a:
                raise NetworkError(f"segment {k} has t_end <= t_start")
            if k and a != segs[k - 1][1]:
                raise NetworkError(f"segment {k} starts at {a}, previous ends at {segs[k - 1][1]}")
        if len({p.n for _, _, p in segs}) != 1:
            raise NetworkError("schedule segments disagree on node count")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, profile: LeaderProfile, t_end: float, t_start: float = 0.0) -> "LeaderSchedule":
        return cls(((t_start, t_end, profile),))

    @property
    def t_start(self) -> float:
        return self.segments[0][0]

    @property
    def t_end(self) -> float:
        return self.segments[-1][1]

    def profile_at(self, t: float) -> LeaderProfile:
        """Profile active at ``t``; boundaries belong to the later segment."""
        for a, b, p in self.segments:
            if a <= t < b:
                return p
        if t == self.t_end:
            return self.segments[-1][2]
        raise NetworkError(f"time {t} outside schedule [{self.t_start}, {self.t_end}]")

    def covers(self, t0: float, t1: float) -> bool:
        return self.t_start <= t0 and t1 <= self.t_end


def reachable_set(net: DirectedNetwork, sources: Iterable[int]) -> frozenset[int]:
    """Nodes reachable from ``sources`` along information flow (sender -> receiver)."""
    sources = list(sources)
    if not sources:
        raise NetworkError("reachable_set needs at least one source")
    for s in sources:
        if not 1 <= s <= net.n:
            raise NetworkError(f"invalid node id {s}")
    seen = set(sources)
    queue = deque(sources)
    while queue:
        j = queue.popleft()
        for i in net.out_neighbors[j]:
            if i not in seen:
                seen.add(i)
                queue.append(i)
    return frozenset(seen)


def is_strongly_connected(net: DirectedNetwork) -> bool:
    # forward reach from node 1 along arrows, and backward reach along reversed arrows
    if len(reachable_set(net, [1])) != net.n:
        return False
    seen = {1}
    queue = deque([1])
    while queue:
        i = queue.popleft()
        for j in net.in_neighbors[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == net.n


def random_strongly_connected(n: int, extra_edge_prob: float, seed: int) -> DirectedNetwork:
    """Random Hamiltonian cycle plus Bernoulli extra arcs, unit weights."""
    if n < 2:
        raise NetworkError("random_strongly_connected needs n >= 2")
    if not 0.0 <= extra_edge_prob <= 1.0:
        raise NetworkError("extra_edge_prob must lie in [0, 1]")
    rng = random.Random(seed)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    arrows = {(order[k], order[(k + 1) % n]) for k in range(n)}
    for src in range(1, n + 1):
        for dst in range(1, n + 1):
            if src != dst and (src, dst) not in arrows and rng.random() < extra_edge_prob:
                arrows.add((src, dst))
    return DirectedNetwork.from_arrows(n, sorted(arrows))


# --- text formats -----------------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_network(text: str, source="<string>") -> DirectedNetwork:
    n = None
    loop_weight = None
    arrows: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "nodes":
                if n is not None or len(parts) != 2:
                    raise ParseError(source, lineno, "expected a single 'nodes <n>' header")
                n = int(parts[1])
                continue
            if parts[0] == "selfloops":
                if len(parts) != 2:
                    raise ParseError(source, lineno, "expected 'selfloops <w>'")
                loop_weight = float(parts[1])
                if loop_weight < 0:
                    raise ParseError(source, lineno, "self-loop weight must be >= 0")
                continue
            if n is None:
                raise ParseError(source, lineno, "edge line before 'nodes <n>' header")
            if len(parts) != 3:
                raise ParseError(source, lineno, "expected 'src dst weight'")
            src, dst, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(source, lineno, f"malformed line {raw.strip()!r}") from None
        if not (w > 0 and np.isfinite(w)):
            raise ParseError(source, lineno, f"non-positive weight {w}")
        if not (1 <= src <= n and 1 <= dst <= n):
            raise ParseError(source, lineno, f"node id outside 1..{n}")
        if src == dst and loop_weight is None:
            raise ParseError(source, lineno, "self-loop without a 'selfloops' header")
        if (src, dst) in seen:
            raise ParseError(source, lineno, f"duplicate edge {src}->{dst}")
        seen.add((src, dst))
        arrows.append((src, dst, w))
    if n is None:
        raise ParseError(source, 0, "missing 'nodes <n>' header")
    net = DirectedNetwork.from_arrows(n, arrows, self_loops=loop_weight is not None)
    if loop_weight:
        net = net.with_self_loops(loop_weight)
    return net


def format_network(net: DirectedNetwork, header: Iterable[str] = ()) -> str:
    lines = list(header)
    lines.append(f"nodes {net.n}")
    body = net.arrows(include_self_loops=True)
    if net.self_loops:
        loops = {net.self_loop(i) for i in net.nodes}
        if len(loops) == 1 and 0.0 not in loops:
            lines.append(f"selfloops {_fmt(loops.pop())}")
            body = net.arrows()
        else:
            lines.append("selfloops 0")
    lines.extend(f"{s} {d} {_fmt(w)}" for s, d, w in body)
    return "\n".join(lines) + "\n"


def load_network(path: str | os.PathLike) -> DirectedNetwork:
    with open(path) as fh:
        return parse_network(fh.read(), source=os.fspath(path))


def save_network(net: DirectedNetwork, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_network(net))


def parse_leaders(text: str, n: int, source="<string>") -> LeaderProfile:
    """Lines ``node delta``; an optional ``input <u0>`` line sets the input level."""
    delta: dict[int, float] = {}
    u0 = 0.0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "input" and len(parts) == 2:
                u0 = float(parts[1])
                continue
            if len(parts) != 2:
                raise ValueError
            node, d = int(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(source, lineno, f"expected 'node delta', got {raw.strip()!r}") from None
        if node in delta:
            raise ParseError(source, lineno, f"duplicate leader entry for node {node}")
        if d < 0:
            raise ParseError(source, lineno, "delta must be non-negative")
        delta[node] = d
    return LeaderProfile.from_leaders(n, delta, u0)


def load_leaders(path: str | os.PathLike, n: int) -> LeaderProfile:
    with open(path) as fh:
        return parse_leaders(fh.read(), n, source=os.fspath(path))


def format_leaders(profile: LeaderProfile) -> str:
    lines = [f"input {_fmt(profile.input_value)}"]
    lines.extend(f"{i + 1} {_fmt(d)}" for i, d in enumerate(profile.delta) if d > 0)
    return "\n".join(lines) + "\n"


def parse_leader_spec(spec: str, n: int, input_value: float = 0.0) -> LeaderProfile:
    """Inline leader spec such as ``"1:1,5:1"`` or ``"1,5"`` (delta 1)."""
    delta: dict[int, float] = {}
    for item in spec.replace(" ", "").split(","):
        if not item:
            continue
        try:
            if ":" in item:
                node, d = item.split(":")
                delta[int(node)] = float(d)
            else:
                delta[int(item)] = 1.0
        except ValueError:
            raise NetworkError(f"bad leader entry {item!r}; expected 'node' or 'node:delta'") from None
    return LeaderProfile.from_leaders(n, delta, input_value)


def parse_schedule(text: str, n: int, source="<string>") -> LeaderSchedule:
    """Lines ``t_start t_end u0 node:delta[,node:delta...]``."""
    segments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(source, lineno, "expected 't_start t_end u0 leaders'")
        try:
            a, b, u0 = float(parts[0]), float(parts[1]), float(parts[2])
            profile = parse_leader_spec(parts[3], n, u0)
        except (ValueError, NetworkError) as exc:
            raise ParseError(source, lineno, str(exc)) from None
        segments.append((a, b, profile))
    return LeaderSchedule(tuple(segments))


def load_schedule(path: str | os.PathLike, n: int) -> LeaderSchedule:
    with open(path) as fh:
        return parse_schedule(fh.read(), n, source=os.fspath(path))


def strongly_connected_components(net: DirectedNetwork) -> list[frozenset[int]]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[frozenset[int]] = []
    counter = 0
    for root in net.nodes:
        if root in index:
            continue
        work = [(root, iter(net.out_neighbors[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(net.out_neighbors[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
    return comps
