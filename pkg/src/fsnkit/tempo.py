"""Data-driven relative tempo and distributed neighbor selection.

Each agent watches its own state increment and those of its in-neighbors,
forms ``g_ij = |rate_i| / |rate_j|`` once per tick and stops when no ratio
moved by more than its threshold ``eps_i`` since the previous tick.  It then
keeps neighbor ``j`` iff ``g_ij > 1``.  No agent ever reads another agent's
decision or any global quantity.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .dynamics import DEFAULT_H, ClfnStepper, DlfnStepper, Trajectory, default_x0
from .graph import DirectedNetwork, LeaderProfile, NetworkError, is_strongly_connected

DEFAULT_EPS = 1e-8
DEFAULT_GUARD = 1e-6
UNDERFLOW = 1e-290
MAX_TICKS = 2_000_000


class SelectionError(RuntimeError):
    """The dynamics died out before every agent met its termination test."""

    def __init__(self, msg: str, agents: Iterable[int] = ()):
        self.agents = sorted(agents)
        super().__init__(f"{msg}; unterminated agents: {self.agents}")


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        raise ZeroDivisionError("zero denominator: dynamics already converged, sample earlier")
    return abs(num) / abs(den)


def tempo_sample_continuous(traj: Trajectory, t_index: int, i: int, j: int) -> float:
    """|x_i'(t)| / |x_j'(t)| at sample ``t_index``."""
    if traj.mode != "continuous":
        raise NetworkError("continuous tempo needs a CLFN trajectory")
    r = traj.rates[t_index]
    return _ratio(r[i - 1], r[j - 1])


def tempo_sample_discrete(traj: Trajectory, k: int, i: int, j: int) -> float:
    """|x_i(k) - x_i(k-1)| / |x_j(k) - x_j(k-1)|."""
    if traj.mode != "discrete":
        raise NetworkError("discrete tempo needs a DLFN trajectory")
    if k < 1:
        raise NetworkError("discrete increments start at k = 1")
    r = traj.rates[k]
    return _ratio(r[i - 1], r[j - 1])


def subset_tempo(traj: Trajectory, V1: Iterable[int], V2: Iterable[int], at: int) -> float:
    """||rates on V1|| / ||rates on V2|| at sample ``at`` (Euclidean norms)."""
    V1, V2 = sorted(set(V1)), sorted(set(V2))
    if not V1 or not V2:
        raise NetworkError("subset tempo needs two non-empty node sets")
    if traj.mode == "discrete" and at < 1:
        raise NetworkError("discrete increments start at k = 1")
    r = traj.rates[at]
    num = float(np.linalg.norm(r[np.array(V1) - 1]))
    den = float(np.linalg.norm(r[np.array(V2) - 1]))
    return _ratio(num, den)


@dataclass
class AgentTempoState:
    """One agent's view: its in-neighbors' latest two tempo samples and its decision."""

    id: int
    neighbors: tuple[int, ...]
    epsilon: float = DEFAULT_EPS
    guard: float = DEFAULT_GUARD
    g_current: dict[int, float] = field(default_factory=dict)
    g_previous: dict[int, float] = field(default_factory=dict)
    terminated: bool = False
    terminated_at: int | None = None
    reduced_neighbors: frozenset[int] = frozenset()
    undecided: frozenset[int] = frozenset()
    carried: int = 0  # samples carried forward over a zero neighbor increment

    def __post_init__(self):
        if not self.epsilon > 0:
            raise NetworkError(f"agent {self.id}: epsilon must be positive")
        self._ready = False

    def observe(self, tick: int, own: float, neighbor_rates: Mapping[int, float]) -> bool:
        """Take this tick's sample; returns True once terminated.

        ``own`` is the agent's own increment, ``neighbor_rates`` maps each
        in-neighbor to its increment.  Nothing else is visible.
        """
        if self.terminated:
            return True
        if not self.neighbors:
            # nothing to select; an agent with no in-neighbors is done at once
            self._finish(tick)
            return True
        sample = {}
        for j in self.neighbors:
            den = neighbor_rates[j]
            if den == 0.0:
                if j not in self.g_current:
                    return False
                sample[j] = self.g_current[j]
                self.carried += 1
            else:
                sample[j] = abs(own) / abs(den)
        self.g_previous, self.g_current = self.g_current, sample
        if not self._ready:
            self._ready = True
            return False
        if all(abs(self.g_current[j] - self.g_previous[j]) < self.epsilon for j in self.neighbors):
            self._finish(tick)
        return self.terminated

    def _finish(self, tick: int) -> None:
        self.terminated = True
        self.terminated_at = tick
        self.reduced_neighbors = frozenset(j for j, g in self.g_current.items() if g > 1.0 + self.guard)
        # edges too close to 1 resolve to "not kept" but are reported
        self.undecided = frozenset(j for j, g in self.g_current.items() if abs(g - 1.0) <= self.guard)


def local_view(rates: np.ndarray, agent: AgentTempoState) -> tuple[float, dict[int, float]]:
    """Own increment and in-neighbor increments, the only data an agent receives."""
    return float(rates[agent.id - 1]), {j: float(rates[j - 1]) for j in agent.neighbors}


@dataclass
class SelectionResult:
    network: DirectedNetwork
    mode: str
    agents: dict[int, AgentTempoState]
    ticks: int
    history: list[tuple[int, int, int, float]] = field(default_factory=list, repr=False)

    @property
    def reduced_sets(self) -> dict[int, frozenset[int]]:
        return {i: a.reduced_neighbors for i, a in self.agents.items()}

    @property
    def termination_ticks(self) -> dict[int, int]:
        return {i: a.terminated_at for i, a in self.agents.items()}

    @property
    def final_g(self) -> dict[tuple[int, int], float]:
        return {(i, j): g for i, a in self.agents.items() for j, g in a.g_current.items()}

    @property
    def undecided(self) -> list[tuple[int, int]]:
        """``(receiver, sender)`` edges whose final g_ij lies within the guard band around 1."""
        return sorted((i, j) for i, a in self.agents.items() for j in a.undecided)

    def reduced_network(self) -> DirectedNetwork:
        return self.network.restricted_to((i, j) for i, js in self.reduced_sets.items() for j in js)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "ticks": self.ticks,
            "agents": {
                str(i): {
                    "in_neighbors": list(a.neighbors),
                    "reduced_neighbors": sorted(a.reduced_neighbors),
                    "terminated_at": a.terminated_at,
                    "epsilon": a.epsilon,
                    "final_g": {str(j): g for j, g in sorted(a.g_current.items())},
                    "undecided": sorted(a.undecided),
                    "carried_samples": a.carried,
                }
                for i, a in self.agents.items()
            },
            "kept_arrows": [[j, i] for i, js in sorted(self.reduced_sets.items()) for j in sorted(js)],
        }

    def history_to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tick", "i", "j", "g"])
            for tick, i, j, g in self.history:
                writer.writerow([tick, i, j, repr(float(g))])


def _per_agent(eps, n: int) -> dict[int, float]:
    if isinstance(eps, Mapping):
        return {i: float(eps.get(i, DEFAULT_EPS)) for i in range(1, n + 1)}
    return {i: float(eps) for i in range(1, n + 1)}


def run_distributed_selection(
    net: DirectedNetwork,
    leaders: LeaderProfile,
    mode: str = "continuous",
    eps: float | Mapping[int, float] = DEFAULT_EPS,
    guard: float = DEFAULT_GUARD,
    h: float = DEFAULT_H,
    x0=None,
    max_ticks: int = MAX_TICKS,
    record: Iterable[tuple[int, int]] | bool = (),
    view: Callable[[np.ndarray, AgentTempoState], tuple[float, dict[int, float]]] = local_view,
) -> SelectionResult:
    """Run the dynamics and let every agent pick its reduced neighbor set from data.

    ``record`` lists ``(i, j)`` pairs whose g_ij series is kept (``True`` keeps
    all edges).  ``view`` builds each agent's observation from the tick's
    increments; swapping it lets tests prove that agents only see local data.
    """
    leaders.check(net)
    if not is_strongly_connected(net):
        raise NetworkError("network is not strongly connected; strong connectivity is required")
    if mode == "discrete":
        net = net.with_self_loops() if not net.self_loops else net
        stepper = DlfnStepper(net, leaders, default_x0(net.n) if x0 is None else x0)
    elif mode == "continuous":
        stepper = ClfnStepper(net, leaders, default_x0(net.n) if x0 is None else x0, h)
    else:
        raise NetworkError(f"mode must be 'continuous' or 'discrete', got {mode!r}")

    epsilons = _per_agent(eps, net.n)
    agents = {
        i: AgentTempoState(i, net.in_neighbors[i], epsilons[i], guard)
        for i in net.nodes
    }
    if record is True:
        record = net.edges()
    watched = sorted(set(record))
    history: list[tuple[int, int, int, float]] = []

    if mode == "discrete":
        stepper.step()  # increments exist from k = 1
    active = set(agents)
    tick = stepper.k
    while active:
        if tick > max_ticks:
            raise SelectionError(f"no termination within {max_ticks} ticks", active)
        rates = stepper.dx if mode == "discrete" else stepper.rate
        if not np.max(np.abs(rates)) > UNDERFLOW:
            raise SelectionError(
                f"state increments underflowed at tick {tick} before termination (eps too small)", active
            )
        for i in sorted(active):
            own, nbrs = view(rates, agents[i])
            if agents[i].observe(tick, own, nbrs):
                active.discard(i)
        for i, j in watched:
            g = agents[i].g_current.get(j)
            if g is not None and agents[i].terminated_at in (None, tick):
                history.append((tick, i, j, g))
        stepper.step()
        tick = stepper.k
    return SelectionResult(net, mode, agents, tick, history)
