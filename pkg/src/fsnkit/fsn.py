"""Following-the-slower-neighbor (FSN) reduction and its reachability/rate checks.

Agent ``i`` keeps in-neighbor ``j`` iff ``v_i / v_j > 1``, where ``v`` is the
Perron vector of L_B (continuous time) or P (discrete time).  Self-loops are
never pruned: they belong to the discrete update, not to the neighbor set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import DirectedNetwork, LeaderProfile, NetworkError, reachable_set
from .spectral import (
    build_perturbed_laplacian,
    build_perturbed_stochastic,
    laplacian_rate,
    perron_max_stochastic,
    perron_min_laplacian,
    stochastic_rate,
)

RATIO_TOL = 1e-9


@dataclass(frozen=True)
class EdgeDecision:
    receiver: int
    sender: int
    ratio: float  # v_receiver / v_sender

    @property
    def margin(self) -> float:
        return self.ratio - 1.0


@dataclass(frozen=True)
class FsnResult:
    original: DirectedNetwork
    reduced: DirectedNetwork
    kept: tuple[EdgeDecision, ...]
    removed: tuple[EdgeDecision, ...]
    vector: np.ndarray = field(repr=False)
    ratio_tol: float = RATIO_TOL

    @property
    def reduced_neighbor_sets(self) -> dict[int, frozenset[int]]:
        return {i: frozenset(js) for i, js in self.reduced.in_neighbors.items()}

    def ties(self) -> list[EdgeDecision]:
        """Removed edges whose ratio sits within ``ratio_tol`` of 1."""
        return [e for e in self.removed if abs(e.margin) <= self.ratio_tol]

    def to_dict(self) -> dict:
        def edge(e: EdgeDecision) -> dict:
            return {"src": e.sender, "dst": e.receiver, "ratio": e.ratio}

        return {
            "n": self.original.n,
            "eigenvector": [float(x) for x in self.vector],
            "kept": [edge(e) for e in self.kept],
            "removed": [edge(e) for e in self.removed],
            "reduced_neighbor_sets": {str(i): sorted(js) for i, js in self.reduced.in_neighbors.items()},
        }


def build_fsn(net: DirectedNetwork, v, ratio_tol: float = RATIO_TOL) -> FsnResult:
    v = np.asarray(v, dtype=float)
    if v.shape != (net.n,):
        raise NetworkError(f"eigenvector has shape {v.shape}, expected ({net.n},)")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise NetworkError("eigenvector must be strictly positive")
    kept, removed = [], []
    for i, j in net.edges():
        decision = EdgeDecision(i, j, float(v[i - 1] / v[j - 1]))
        (kept if decision.ratio > 1.0 + ratio_tol else removed).append(decision)
    reduced = net.restricted_to((e.receiver, e.sender) for e in kept)
    return FsnResult(net, reduced, tuple(kept), tuple(removed), v.copy(), ratio_tol)


def clfn_fsn(net: DirectedNetwork, leaders: LeaderProfile, ratio_tol: float = RATIO_TOL) -> FsnResult:
    pair = perron_min_laplacian(build_perturbed_laplacian(net, leaders))
    return build_fsn(net, pair.vector, ratio_tol)


def dlfn_fsn(net: DirectedNetwork, leaders: LeaderProfile, ratio_tol: float = RATIO_TOL) -> FsnResult:
    pair = perron_max_stochastic(build_perturbed_stochastic(net, leaders))
    return build_fsn(net, pair.vector, ratio_tol)


@dataclass(frozen=True)
class Reachability:
    ok: bool
    unreachable: frozenset[int]

    def __bool__(self) -> bool:
        return self.ok


def verify_lf_reachability(fsn: FsnResult, leaders: LeaderProfile) -> Reachability:
    """Every agent reachable from some leader in the reduced network."""
    leaders.check(fsn.reduced)
    reached = reachable_set(fsn.reduced, leaders.leaders)
    missing = frozenset(fsn.reduced.nodes) - reached
    return Reachability(not missing, missing)


@dataclass(frozen=True)
class RateReport:
    lambda_orig: float
    lambda_fsn: float
    improved: bool


def rate_report_clfn(net: DirectedNetwork, leaders: LeaderProfile, fsn: FsnResult) -> RateReport:
    lam_orig = laplacian_rate(net, leaders)
    lam_fsn = laplacian_rate(fsn.reduced, leaders)
    if lam_fsn < lam_orig - 1e-10:
        raise AssertionError(f"FSN slowed convergence: lambda_1 {lam_fsn} < {lam_orig}")
    return RateReport(lam_orig, lam_fsn, lam_fsn > lam_orig)


def rate_report_dlfn(net: DirectedNetwork, leaders: LeaderProfile, fsn: FsnResult) -> RateReport:
    lam_orig = stochastic_rate(net, leaders)
    lam_fsn = stochastic_rate(fsn.reduced, leaders)
    # n = 1 has nothing to prune, so the FSN is the original network
    if net.n > 1 and not lam_fsn < lam_orig:
        raise AssertionError(f"FSN did not speed up DLFN: lambda_n {lam_fsn} >= {lam_orig}")
    return RateReport(lam_orig, lam_fsn, lam_fsn < lam_orig)
