import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import G7_FSN_ARROWS, random_instance
from fsnkit.dynamics import default_x0, simulate_clfn, simulate_dlfn
from fsnkit.fsn import build_fsn, clfn_fsn, dlfn_fsn
from fsnkit.graph import DirectedNetwork, LeaderProfile, NetworkError
from fsnkit.spectral import clfn_perron, dlfn_perron
from fsnkit.tempo import (
    AgentTempoState,
    SelectionError,
    local_view,
    run_distributed_selection,
    subset_tempo,
    tempo_sample_continuous,
    tempo_sample_discrete,
)

seeds = st.integers(0, 2**31 - 1)


@pytest.fixture(scope="module")
def clfn_traj():
    from fsnkit import fixtures
    return simulate_clfn(fixtures.g7(), fixtures.g7_leaders(), t_end=30)


@pytest.fixture(scope="module")
def dlfn_traj():
    from fsnkit import fixtures
    return simulate_dlfn(fixtures.g7(), fixtures.g7_leaders(), k_end=200, auto_self_loops=True)


# expected values are ratios of 4-decimal printed vector entries, hence 1e-3
@pytest.mark.parametrize("j, expected", [(5, 1.3384), (6, 0.8758)])
def test_continuous_samples_approach_printed_ratios(clfn_traj, j, expected):
    assert tempo_sample_continuous(clfn_traj, -1, 3, j) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("j, expected", [(5, 1.3271), (2, 1.0675)])
def test_discrete_samples_approach_printed_ratios(dlfn_traj, j, expected):
    assert tempo_sample_discrete(dlfn_traj, len(dlfn_traj) - 1, 3, j) == pytest.approx(expected, abs=1e-3)


def test_subset_tempo_limit(clfn_traj):
    assert subset_tempo(clfn_traj, {1, 2}, {5}, -1) == pytest.approx(1.7297, abs=1e-3)


def test_samples_match_exact_eigenvector_ratios(g7, g7_loops, leaders15, clfn_traj, dlfn_traj):
    v = clfn_perron(g7, leaders15).vector
    w = dlfn_perron(g7_loops, leaders15).vector
    for j in (2, 5, 6):
        assert abs(tempo_sample_continuous(clfn_traj, -1, 3, j) - v[2] / v[j - 1]) < 1e-3
        assert abs(tempo_sample_discrete(dlfn_traj, 200, 3, j) - w[2] / w[j - 1]) < 1e-3


def test_trivial_and_reciprocal_samples(clfn_traj, dlfn_traj):
    for idx in (1, 50, 500, -1):
        assert tempo_sample_continuous(clfn_traj, idx, 4, 4) == 1.0
        assert subset_tempo(clfn_traj, {2, 7}, {2, 7}, idx) == 1.0
        a = subset_tempo(clfn_traj, {1, 2}, {5, 6}, idx)
        b = subset_tempo(clfn_traj, {5, 6}, {1, 2}, idx)
        assert a * b == pytest.approx(1.0, rel=1e-14)
    assert tempo_sample_discrete(dlfn_traj, 3, 1, 1) == 1.0


def test_sample_errors(g7, leaders15, clfn_traj, dlfn_traj):
    with pytest.raises(NetworkError):
        tempo_sample_discrete(dlfn_traj, 0, 3, 5)
    with pytest.raises(NetworkError):
        tempo_sample_discrete(clfn_traj, 3, 3, 5)
    with pytest.raises(NetworkError):
        subset_tempo(clfn_traj, set(), {1}, 0)
    flat = simulate_clfn(g7, leaders15, np.full(7, 0.1), t_end=0.1)
    with pytest.raises(ZeroDivisionError, match="converged"):
        tempo_sample_continuous(flat, 3, 3, 5)


@pytest.mark.parametrize("mode", ["continuous", "discrete"])
def test_g7_distributed_selection_matches_fsn(g7, leaders15, mode):
    res = run_distributed_selection(g7, leaders15, mode)
    assert res.reduced_sets == {1: set(), 2: {1}, 3: {2, 5}, 4: {3}, 5: set(), 6: {7}, 7: {1}}
    assert {(s, d) for s, d, _ in res.reduced_network().arrows()} == G7_FSN_ARROWS
    assert res.undecided == []
    v = (clfn_perron(g7, leaders15) if mode == "continuous" else dlfn_perron(g7.with_self_loops(), leaders15)).vector
    for (i, j), g in res.final_g.items():
        assert abs(g - v[i - 1] / v[j - 1]) < 1e-3
    for a in res.agents.values():
        assert a.terminated
        assert all(abs(a.g_current[j] - a.g_previous[j]) < a.epsilon for j in a.neighbors)
        assert a.reduced_neighbors <= set(a.neighbors)


def test_reciprocity_of_final_samples(g7, leaders15):
    res = run_distributed_selection(g7, leaders15, "continuous")
    g = res.final_g
    both = [(i, j) for (i, j) in g if (j, i) in g]
    assert both
    # agents stop at different ticks, so compare samples from one tick
    traj = simulate_clfn(g7, leaders15, t_end=20)
    for i, j in both:
        assert tempo_sample_continuous(traj, -1, i, j) * tempo_sample_continuous(traj, -1, j, i) == pytest.approx(1.0)


def test_locality_poisoned_view(g7, leaders15):
    def poisoned(rates, agent):
        fake = np.full_like(rates, np.nan)
        visible = [agent.id - 1] + [j - 1 for j in agent.neighbors]
        fake[visible] = rates[visible]
        # everything outside the local view is garbage; a non-local agent would break
        fake[np.isnan(fake)] = 1e300
        return local_view(fake, agent)

    for mode in ("continuous", "discrete"):
        clean = run_distributed_selection(g7, leaders15, mode)
        dirty = run_distributed_selection(g7, leaders15, mode, view=poisoned)
        assert dirty.reduced_sets == clean.reduced_sets
        assert dirty.termination_ticks == clean.termination_ticks
        assert dirty.final_g == clean.final_g


def test_zero_neighbor_increment_carries_previous_sample():
    agent = AgentTempoState(3, (2, 5), epsilon=1e-3)
    assert not agent.observe(1, 1.0, {2: 2.0, 5: 0.5})
    # g_32 is carried over, g_35 repeats, so the agent stops here
    assert agent.observe(2, 1.0, {2: 0.0, 5: 0.5})
    assert agent.carried == 1
    assert agent.g_current[2] == 0.5 and agent.terminated_at == 2
    assert agent.reduced_neighbors == {5}


def test_zero_increment_before_first_sample_waits():
    agent = AgentTempoState(3, (2,), epsilon=1e-3)
    assert not agent.observe(1, 1.0, {2: 0.0})
    assert agent.g_current == {}


def test_agent_without_neighbors_finishes_at_once():
    agent = AgentTempoState(1, ())
    assert agent.observe(4, 0.3, {})
    assert agent.terminated_at == 4 and agent.reduced_neighbors == set()


def test_guard_band_marks_undecided():
    agent = AgentTempoState(2, (1, 7), epsilon=1e-3, guard=1e-6)
    agent.observe(1, 1.0, {1: 1.0, 7: 0.5})
    agent.observe(2, 1.0, {1: 1.0, 7: 0.5})
    assert agent.undecided == {1}
    assert agent.reduced_neighbors == {7}


def test_epsilon_must_be_positive():
    with pytest.raises(NetworkError):
        AgentTempoState(1, (2,), epsilon=0.0)


def test_underflow_is_reported(g7):
    leaders = LeaderProfile.from_leaders(7, [1, 5], 0.0)
    tiny = 1e-295 * default_x0(7)
    with pytest.raises(SelectionError, match="underflow") as info:
        run_distributed_selection(g7, leaders, "discrete", x0=tiny)
    assert info.value.agents
    with pytest.raises(SelectionError):
        run_distributed_selection(g7, leaders, "continuous", x0=np.zeros(7))


def test_max_ticks_is_reported(g7, leaders15):
    with pytest.raises(SelectionError, match="no termination"):
        run_distributed_selection(g7, leaders15, "continuous", max_ticks=10)


def test_per_agent_epsilon_changes_only_that_agent(g7, leaders15):
    base = run_distributed_selection(g7, leaders15, "discrete")
    loose = run_distributed_selection(g7, leaders15, "discrete", eps={3: 1e-2})
    assert loose.termination_ticks[3] < base.termination_ticks[3]
    for i in (1, 2, 4, 5, 6, 7):
        assert loose.termination_ticks[i] == base.termination_ticks[i]


def test_history_export(tmp_path, g7, leaders15):
    res = run_distributed_selection(g7, leaders15, "discrete", record=[(3, 5), (3, 6)])
    path = tmp_path / "g.csv"
    res.history_to_csv(path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["tick", "i", "j", "g"]
    assert {(r[1], r[2]) for r in rows[1:]} == {("3", "5"), ("3", "6")}
    assert int(rows[-1][0]) == res.termination_ticks[3]
    data = res.to_dict()
    assert sorted(map(tuple, data["kept_arrows"])) == sorted(G7_FSN_ARROWS)


@pytest.mark.parametrize("mode", ["continuous", "discrete"])
@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_distributed_equals_centralized(mode, seed):
    net, leaders = random_instance(seed, n_max=10, max_leaders=2)
    res = run_distributed_selection(net, leaders, mode)
    if mode == "continuous":
        central = clfn_fsn(net, leaders)
    else:
        central = dlfn_fsn(net.with_self_loops(), leaders)
    undecided = set(res.undecided)
    for i in net.nodes:
        got = {j for j in res.reduced_sets[i] if (i, j) not in undecided}
        want = {j for j in central.reduced_neighbor_sets[i] if (i, j) not in undecided}
        assert got == want
    # undecided edges are exact ties of the eigenvector
    for i, j in undecided:
        assert abs(central.vector[i - 1] / central.vector[j - 1] - 1) < 1e-9


def test_oscillating_tempo_needs_tighter_epsilon():
    # directed 3-cycle, all leaders: every v ratio is exactly 1, and the complex pair
    # 2.5 +- 0.87i makes g_ij oscillate, so |delta g| can dip below 1e-8 at a turning point
    net = DirectedNetwork.from_arrows(3, [(1, 2), (2, 3), (3, 1)])
    leaders = LeaderProfile.from_leaders(3, [1, 2, 3], 0.1)
    assert clfn_fsn(net, leaders).reduced.num_edges == 0
    res = run_distributed_selection(net, leaders, "continuous", eps=1e-10, x0=default_x0(3, 91))
    assert res.reduced_network().num_edges == 0
