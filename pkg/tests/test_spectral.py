import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from conftest import G7_V_CLFN, G7_V_DLFN, random_instance
from fsnkit.graph import DirectedNetwork, LeaderProfile, NetworkError
from fsnkit.spectral import (
    ConvergenceError,
    PerturbedStochastic,
    build_perturbed_laplacian,
    build_perturbed_stochastic,
    clfn_perron,
    dlfn_perron,
    perron_max_stochastic,
    perron_min_laplacian,
)

seeds = st.integers(0, 2**31 - 1)


def _reweighted(net, seed):
    rng = np.random.default_rng(seed)
    return DirectedNetwork(net.n, {e: float(rng.uniform(0.2, 3.0)) for e in net.weights})


def test_g7_clfn_eigenpair(g7, leaders15):
    pair = clfn_perron(g7, leaders15)
    assert np.max(np.abs(pair.vector - G7_V_CLFN)) <= 5e-4
    assert pair.value == pytest.approx(0.1336022669707, abs=1e-10)
    assert np.linalg.norm(pair.vector) == pytest.approx(1.0)


def test_g7_dlfn_eigenpair(g7_loops, leaders15):
    pair = dlfn_perron(g7_loops, leaders15)
    assert np.max(np.abs(pair.vector - G7_V_DLFN)) <= 5e-4
    assert pair.value == pytest.approx(0.9495973714, abs=1e-9)


def test_g7_matches_oracle(g7, g7_loops, leaders15):
    LB = build_perturbed_laplacian(g7, leaders15).matrix
    lam, v = oracle.smallest_real_eigenpair(LB)
    pair = clfn_perron(g7, leaders15)
    assert abs(pair.value - lam) <= 1e-8 and np.max(np.abs(pair.vector - v)) <= 1e-6
    P = build_perturbed_stochastic(g7_loops, leaders15).matrix
    lam, v = oracle.largest_real_eigenpair(P)
    pair = dlfn_perron(g7_loops, leaders15)
    assert abs(pair.value - lam) <= 1e-8 and np.max(np.abs(pair.vector - v)) <= 1e-6


def test_trivial_single_node():
    net = DirectedNetwork(1, {(1, 1): 1.0}, self_loops=True)
    leaders = LeaderProfile((1.0,))
    pair = perron_max_stochastic(PerturbedStochastic(np.array([[0.5]]), np.array([0.5])))
    assert pair.value == 0.5 and pair.vector.tolist() == [1.0]
    assert dlfn_perron(net, leaders).value == pytest.approx(0.5)
    assert clfn_perron(DirectedNetwork(1), LeaderProfile((2.0,))).value == pytest.approx(2.0)


def test_augmented_matrix_is_stochastic(g7_loops, leaders15):
    H = build_perturbed_stochastic(g7_loops, leaders15).augmented()
    assert H.shape == (8, 8)
    assert np.allclose(H.sum(axis=1), 1.0, atol=1e-12)
    assert H[-1, -1] == 1.0


def test_input_validation(g7, leaders15):
    broken = DirectedNetwork.from_arrows(2, [(1, 2)])
    with pytest.raises(NetworkError, match="not strongly connected"):
        build_perturbed_laplacian(broken, LeaderProfile.from_leaders(2, [1]))
    with pytest.raises(NetworkError, match="self-loops"):
        build_perturbed_stochastic(g7, leaders15)
    with pytest.raises(NetworkError):
        build_perturbed_laplacian(g7, LeaderProfile.from_leaders(3, [1]))
    # leader-reachable but not strongly connected is fine when not strict
    build_perturbed_laplacian(broken, LeaderProfile.from_leaders(2, [1]), strict=False)
    with pytest.raises(NetworkError, match="not reachable"):
        build_perturbed_laplacian(broken, LeaderProfile.from_leaders(2, [2]), strict=False)


def test_max_iter_exhaustion_raises(g7, leaders15):
    with pytest.raises(ConvergenceError):
        perron_min_laplacian(build_perturbed_laplacian(g7, leaders15), max_iter=3)


@settings(max_examples=200, deadline=None)
@given(seed=seeds)
def test_row_sum_identities(seed):
    net, leaders = random_instance(seed)
    LB = build_perturbed_laplacian(net, leaders)
    assert np.allclose(LB.matrix.sum(axis=1), leaders.as_array(), atol=1e-12, rtol=0)
    P = build_perturbed_stochastic(net.with_self_loops(), leaders)
    assert np.allclose(P.matrix.sum(axis=1) + P.q, 1.0, atol=1e-12, rtol=0)
    assert np.all(P.matrix >= 0)


@settings(max_examples=200, deadline=None)
@given(seed=seeds)
def test_bounds_residual_and_positivity(seed):
    net, leaders = random_instance(seed)
    for pair, M in (
        (clfn_perron(net, leaders), build_perturbed_laplacian(net, leaders).matrix),
        (dlfn_perron(net.with_self_loops(), leaders),
         build_perturbed_stochastic(net.with_self_loops(), leaders).matrix),
    ):
        assert pair.vector.min() > 0
        assert pair.residual <= 1e-12
        assert np.linalg.norm(M @ pair.vector - pair.value * pair.vector) == pytest.approx(pair.residual, abs=1e-15)
    assert clfn_perron(net, leaders).value > 0
    assert 0 < dlfn_perron(net.with_self_loops(), leaders).value < 1


@settings(max_examples=200, deadline=None)
@given(seed=seeds, weighted=st.booleans())
def test_power_iteration_matches_dense_oracle(seed, weighted):
    net, leaders = random_instance(seed, n_max=8)
    if weighted:
        net = _reweighted(net, seed)
    LB = build_perturbed_laplacian(net, leaders).matrix
    lam, v = oracle.smallest_real_eigenpair(LB)
    pair = perron_min_laplacian(build_perturbed_laplacian(net, leaders))
    assert abs(pair.value - lam) <= 1e-8
    assert np.max(np.abs(pair.vector - v)) <= 1e-6

    looped = net.with_self_loops()
    P = build_perturbed_stochastic(looped, leaders).matrix
    lam, v = oracle.largest_real_eigenpair(P)
    pair = perron_max_stochastic(build_perturbed_stochastic(looped, leaders))
    assert abs(pair.value - lam) <= 1e-8
    assert np.max(np.abs(pair.vector - v)) <= 1e-6
