"""Perturbed Laplacian / perturbed stochastic matrices and their Perron eigenpairs.

Both eigenpairs come from plain power iteration on an irreducible nonnegative
matrix with positive diagonal (hence primitive):

* ``L_B = L + diag(delta)``: iterate on ``beta*I - L_B`` with
  ``beta = max_i [L_B]_ii + 1``; the Perron root ``rho`` gives
  ``lambda_1(L_B) = beta - rho``.
* ``P = (D + diag(delta))^{-1} W`` with self-loops: iterate on ``P`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import (
    DirectedNetwork,
    LeaderProfile,
    NetworkError,
    is_strongly_connected,
    reachable_set,
    strongly_connected_components,
)


class ConvergenceError(RuntimeError):
    """Power iteration failed to certify a positive eigenpair."""


@dataclass(frozen=True)
class PerturbedLaplacian:
    matrix: np.ndarray
    delta: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PerturbedStochastic:
    matrix: np.ndarray
    q: np.ndarray  # input column, q_i = delta_i / (delta_i + d_i)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def augmented(self) -> np.ndarray:
        """H = [[P, q], [0, 1]] acting on (x, u)."""
        n = self.n
        H = np.zeros((n + 1, n + 1))
        H[:n, :n] = self.matrix
        H[:n, n] = self.q
        H[n, n] = 1.0
        return H


@dataclass(frozen=True)
class PerronPair:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int


def _check_inputs(net: DirectedNetwork, leaders: LeaderProfile, strict: bool) -> None:
    """``strict`` demands strong connectivity; otherwise every agent must be reachable from a leader."""
    leaders.check(net)
    if strict:
        if not is_strongly_connected(net):
            raise NetworkError("network is not strongly connected; strong connectivity is required")
    elif len(reachable_set(net, leaders.leaders)) != net.n:
        raise NetworkError("some agents are not reachable from any leader")


def build_perturbed_laplacian(net: DirectedNetwork, leaders: LeaderProfile, strict: bool = True) -> PerturbedLaplacian:
    _check_inputs(net, leaders, strict)
    delta = leaders.as_array()
    return PerturbedLaplacian(net.laplacian() + np.diag(delta), delta)


def build_perturbed_stochastic(net: DirectedNetwork, leaders: LeaderProfile, strict: bool = True) -> PerturbedStochastic:
    _check_inputs(net, leaders, strict)
    missing = [i for i in net.nodes if net.self_loop(i) <= 0]
    if missing:
        raise NetworkError(f"discrete-time network needs self-loops; missing at nodes {missing}")
    W = net.adjacency()
    delta = leaders.as_array()
    scale = W.sum(axis=1) + delta
    return PerturbedStochastic(W / scale[:, None], delta / scale)


def default_max_iter(n: int, tol: float) -> int:
    return int(min(10**6, max(1000, 200 * n * math.log(1.0 / tol))))


def _power_iteration(M: np.ndarray, tol: float, max_iter: int | None) -> tuple[float, np.ndarray, float, int]:
    """Perron root and vector of a primitive nonnegative matrix.

    Stops once the explicit residual ``||M v - rho v||`` drops to ``tol``.
    """
    n = M.shape[0]
    if max_iter is None:
        max_iter = default_max_iter(n, tol)
    v = np.full(n, 1.0 / math.sqrt(n))
    for it in range(1, max_iter + 1):
        w = M @ v
        rho = float(v @ w)
        residual = float(np.linalg.norm(w - rho * v))
        # half of tol leaves headroom for the residual recomputed by callers
        if residual <= 0.5 * tol:
            return rho, v, residual, it
        norm = np.linalg.norm(w)
        if norm == 0.0 or not np.isfinite(norm):
            raise ConvergenceError("power iteration collapsed to zero")
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not reach residual {tol:g} in {max_iter} steps "
        f"(last residual {residual:.3e}); spectral gap may be nearly degenerate"
    )


def _certify(v: np.ndarray) -> np.ndarray:
    if v.min() <= 0.0:
        raise ConvergenceError(
            f"Perron vector has non-positive entry {v.min():.3e}; network is probably not strongly connected"
        )
    return v


def perron_min_laplacian(LB: PerturbedLaplacian, tol: float = 1e-12, max_iter: int | None = None) -> PerronPair:
    """Smallest eigenvalue lambda_1(L_B) with its positive unit eigenvector."""
    M = LB.matrix
    beta = float(np.max(np.diag(M))) + 1.0
    H = beta * np.eye(LB.n) - M
    rho, v, _, iters = _power_iteration(H, tol, max_iter)
    v = _certify(v)
    lam = beta - rho
    residual = float(np.linalg.norm(M @ v - lam * v))
    return PerronPair(lam, v, residual, iters)


def perron_max_stochastic(P: PerturbedStochastic, tol: float = 1e-12, max_iter: int | None = None) -> PerronPair:
    """Largest eigenvalue lambda_n(P) with its positive unit eigenvector."""
    if np.any(np.diag(P.matrix) <= 0):
        raise NetworkError("perturbed stochastic matrix needs a positive diagonal")
    rho, v, _, iters = _power_iteration(P.matrix, tol, max_iter)
    v = _certify(v)
    residual = float(np.linalg.norm(P.matrix @ v - rho * v))
    return PerronPair(rho, v, residual, iters)


def clfn_perron(net: DirectedNetwork, leaders: LeaderProfile, tol: float = 1e-12) -> PerronPair:
    return perron_min_laplacian(build_perturbed_laplacian(net, leaders), tol)


def dlfn_perron(net: DirectedNetwork, leaders: LeaderProfile, tol: float = 1e-12) -> PerronPair:
    return perron_max_stochastic(build_perturbed_stochastic(net, leaders), tol)


def _blockwise(M: np.ndarray, net: DirectedNetwork, solve) -> list[float]:
    """Apply ``solve`` to every irreducible diagonal block of ``M`` (one per SCC of ``net``)."""
    values = []
    for comp in strongly_connected_components(net):
        idx = np.array(sorted(comp)) - 1
        block = M[np.ix_(idx, idx)]
        values.append(float(block[0, 0]) if len(idx) == 1 else solve(block))
    return values


def laplacian_rate(net: DirectedNetwork, leaders: LeaderProfile, tol: float = 1e-12) -> float:
    """lambda_1(L_B) for a network that need not be strongly connected.

    The spectrum of a reducible L_B is the union of the spectra of its SCC
    blocks, so the smallest real eigenvalue is the minimum of the block
    Perron values.  Used for reduced (FSN, tree) networks.
    """
    leaders.check(net)
    M = net.laplacian() + np.diag(leaders.as_array())

    def solve(block):
        return perron_min_laplacian(PerturbedLaplacian(block, np.diag(block)), tol).value

    return min(_blockwise(M, net, solve))


def stochastic_rate(net: DirectedNetwork, leaders: LeaderProfile, tol: float = 1e-12) -> float:
    """lambda_n(P) for a self-looped network that need not be strongly connected."""
    leaders.check(net)
    missing = [i for i in net.nodes if net.self_loop(i) <= 0]
    if missing:
        raise NetworkError(f"discrete-time network needs self-loops; missing at nodes {missing}")
    W = net.adjacency()
    P = W / (W.sum(axis=1) + leaders.as_array())[:, None]

    def solve(block):
        return perron_max_stochastic(PerturbedStochastic(block, np.zeros(len(block))), tol).value

    return max(_blockwise(P, net, solve))
