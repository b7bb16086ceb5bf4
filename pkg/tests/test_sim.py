import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pubsub_gossip import degree_dist as dd
from pubsub_gossip import overlay as ov
from pubsub_gossip import sim
from pubsub_gossip.errors import InvalidPublisher, TooLarge
from pubsub_gossip.overlay import OverlayGraph

from conftest import random_graph, small_graphs


def star(leaves):
    return OverlayGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def run_ref(graph, subs, publisher, gamma, ttl0=None, seed=0, trace=None):
    states = sim.subscription_phase(graph, subs)
    return sim.disseminate(graph, states, subs, publisher, gamma, ttl0,
                           np.random.default_rng(seed), trace=trace)


# subscriptions

def test_assign_subscriptions_extremes():
    g = ov.OverlayGraph.from_edges(50, [])
    rng = np.random.default_rng(0)
    assert not sim.assign_subscriptions(g, 0.0, rng).any()
    assert sim.assign_subscriptions(g, 1.0, rng).all()


def test_assign_subscriptions_binomial():
    g = ov.OverlayGraph.from_edges(10_000, [])
    count = sim.assign_subscriptions(g, 0.1, np.random.default_rng(4)).sum()
    assert abs(count - 1000) <= 3 * math.sqrt(10_000 * 0.1 * 0.9)


def test_subscription_phase_triangle(triangle):
    states = sim.subscription_phase(triangle, [True, False, False])
    assert states[1].neighbor_subs == {0: True, 2: False}
    assert states[2].neighbor_subs == {0: True, 1: False}
    assert states[0].neighbor_subs == {1: False, 2: False}
    sim.unsubscribe(states, triangle, 0)
    assert states[1].neighbor_subs == {0: False, 2: False}
    sim.subscribe(states, triangle, 2)
    assert states[0].neighbor_subs == {1: False, 2: True}
    assert states[1].neighbor_subs == {0: False, 2: True}


@given(small_graphs(max_nodes=12), st.data())
def test_subscription_caches_match(g, data):
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    states = sim.subscription_phase(g, subs)
    for u in range(g.n):
        assert set(states[u].neighbor_subs) == set(g.neighbors(u).tolist())
        for v, flag in states[u].neighbor_subs.items():
            assert flag == subs[v]
    np.testing.assert_array_equal(sim.arc_match_flags(g, states),
                                  sim.arc_flags_from_subs(g, subs))


# dissemination examples

def test_nothing_sent_without_subscribers_or_gossip():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 12, 0.4)
    res = run_ref(g, [False] * 12, 3, 0.0)
    assert (res.receivers, res.messages_sent) == (1, 0)


def test_flooding_reaches_component():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = random_graph(rng, 15, 0.15)
        pub = int(rng.integers(15))
        comp = ov.component_labels(g)
        size = int((comp == comp[pub]).sum())
        assert run_ref(g, [False] * 15, pub, 1.0).receivers == size


def test_path_hand_trace(path3):
    res = run_ref(path3, [False, True, False], 0, 0.0)
    assert res.receivers == 2
    assert res.subscribers_reached == 1
    assert res.messages_sent == 1
    assert res.max_hops == 1


def test_star_expected_receivers():
    g = star(4)
    subs = np.zeros(5, dtype=bool)
    r = sim.receivers_monte_carlo(g, subs, 0, 0.5, 10_000, np.random.default_rng(5))
    se = r.std(ddof=1) / math.sqrt(r.size)
    assert abs(r.mean() - 3.0) < 3 * se


def test_invalid_publisher(triangle):
    with pytest.raises(InvalidPublisher):
        run_ref(triangle, [False] * 3, 3, 0.5)
    with pytest.raises(InvalidPublisher):
        sim.disseminate_fast(triangle, np.zeros(6, bool), np.zeros(3, bool), -1, 0.5)


def test_ttl_limits_hops():
    line = OverlayGraph.from_edges(6, [(i, i + 1) for i in range(5)])
    subs = [False] * 6
    for ttl, expected in [(0, 0), (1, 1), (2, 2), (3, 3), (10, 6)]:
        res = run_ref(line, subs, 0, 1.0, ttl0=ttl)
        assert res.receivers == expected
        fast = sim.disseminate_fast(line, sim.arc_flags_from_subs(line, subs), subs, 0, 1.0, ttl)
        assert fast == res
    # a ttl-1 node sends copies that are dropped on arrival
    assert run_ref(line, subs, 0, 1.0, ttl0=1).messages_sent == 1


def test_publisher_counts_as_subscriber(triangle):
    res = run_ref(triangle, [True, False, False], 0, 0.0)
    assert res.subscribers_reached == 1 and res.receivers == 1


def test_handled_cache_drops_duplicates(triangle):
    states = sim.subscription_phase(triangle, [False] * 3)
    rng = np.random.default_rng(0)
    first = sim.disseminate(triangle, states, [False] * 3, 0, 1.0, None, rng, event_id=7)
    assert first.receivers == 3
    assert all(7 in st.handled for st in states)
    again = sim.disseminate(triangle, states, [False] * 3, 1, 1.0, None, rng, event_id=7)
    assert again.receivers == 0
    other = sim.disseminate(triangle, states, [False] * 3, 1, 1.0, None, rng, event_id=8)
    assert other.receivers == 3


# reference vs compiled kernel

@given(small_graphs(min_nodes=1, max_nodes=14), st.data())
def test_fast_path_matches_reference(g, data):
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    pub = data.draw(st.integers(0, g.n - 1))
    gamma = data.draw(st.sampled_from([0.0, 0.3, 0.5, 0.9, 1.0]))
    ttl = data.draw(st.one_of(st.none(), st.integers(0, g.n + 1)))
    seed = data.draw(st.integers(0, 2 ** 32))
    trace = sim.Trace()
    ref = run_ref(g, subs, pub, gamma, ttl, seed, trace)
    fast, hop = sim.disseminate_fast(g, sim.arc_flags_from_subs(g, subs), subs, pub, gamma,
                                     ttl, np.random.default_rng(seed), return_hops=True)
    assert fast == ref
    assert {u: int(hop[u]) for u in np.flatnonzero(hop >= 0)} == trace.hops


def test_fast_path_matches_reference_large():
    rng = np.random.default_rng(3)
    g = ov.configuration_model(dd.sample_degree_sequence(dd.poisson(5), 3000, rng), rng)
    subs = rng.random(g.n) < 0.15
    arcs = sim.arc_flags_from_subs(g, subs)
    for seed in range(30):
        ref = run_ref(g, subs, seed, 0.12, None, seed)
        fast = sim.disseminate_fast(g, arcs, subs, seed, 0.12, None, np.random.default_rng(seed))
        assert fast == ref
    assert ref.receivers > 1


def test_cache_drives_forwarding(path3):
    # a stale cache entry is what the relay acts on, not the true subscription
    states = sim.subscription_phase(path3, [False, True, False])
    states[1].is_subscriber = False  # removal not yet announced
    res = sim.disseminate(path3, states, [False, False, False], 0, 0.0, None,
                          np.random.default_rng(0))
    assert res.receivers == 2
    sim.unsubscribe(states, path3, 1)
    states[1].handled.clear()
    states[0].handled.clear()
    res = sim.disseminate(path3, states, [False, False, False], 0, 0.0, None,
                          np.random.default_rng(0))
    assert res.receivers == 1


# oracle

def test_oracle_path_example(path3):
    pmf = sim.smallgraph_oracle(path3, [False] * 3, 0, 0.5)
    np.testing.assert_allclose(pmf, [0, 0.5, 0.25, 0.25])


@given(small_graphs(max_nodes=7), st.data())
def test_oracle_trivial_cases(g, data):
    subs = [False] * g.n
    pub = data.draw(st.integers(0, g.n - 1))
    labels = ov.component_labels(g)
    size = int((labels == labels[pub]).sum())
    if len(sim.gossip_links(g, subs)) <= sim.ORACLE_MAX_LINKS:
        pmf0 = sim.smallgraph_oracle(g, subs, pub, 0.0)
        assert pmf0[1] == 1 and pmf0.sum() == 1
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    if len(sim.gossip_links(g, subs)) <= sim.ORACLE_MAX_LINKS:
        pmf1 = sim.smallgraph_oracle(g, subs, pub, 1.0)
        assert pmf1[size] == pytest.approx(1.0)


@given(small_graphs(max_nodes=6), st.data())
def test_lazy_oracle_matches_full_enumeration(g, data):
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    if len(sim.gossip_links(g, subs)) > 14:
        subs = [True] * g.n
    pub = data.draw(st.integers(0, g.n - 1))
    gamma = data.draw(st.sampled_from([0.1, 0.25, 0.5, 0.75]))
    lazy = sim.smallgraph_oracle(g, subs, pub, gamma)
    full = sim.enumerate_oracle(g, subs, pub, gamma)
    np.testing.assert_allclose(lazy, full, atol=1e-12)
    assert lazy.sum() == pytest.approx(1.0)


def test_oracle_too_large():
    k6 = OverlayGraph.from_edges(6, [(u, v) for u in range(6) for v in range(u + 1, 6)])
    with pytest.raises(TooLarge):
        sim.smallgraph_oracle(k6, [False] * 6, 0, 0.5)  # 30 gossip links
    assert sim.smallgraph_oracle(k6, [True] * 6, 0, 0.5)[6] == 1.0


def test_oracle_matches_simulation_star():
    g = star(4)
    pmf = sim.smallgraph_oracle(g, [False] * 5, 0, 0.5)
    binom = [math.comb(4, k) / 16 for k in range(5)]
    np.testing.assert_allclose(pmf[1:], binom)


# invariants on random graphs (the acceptance module runs these at full volume)

@given(small_graphs(min_nodes=2, max_nodes=12), st.data())
def test_coupling_monotone(g, data):
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    pub = data.draw(st.integers(0, g.n - 1))
    u = np.random.default_rng(data.draw(st.integers(0, 2 ** 32))).random(g.indices.size)
    arcs = sim.arc_flags_from_subs(g, subs)
    prev = None
    for gamma in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        _, hop = sim.disseminate_coupled(g, arcs, subs, pub, gamma, u)
        cur = set(np.flatnonzero(hop >= 0).tolist())
        if prev is not None:
            assert prev <= cur
        prev = cur


@given(small_graphs(min_nodes=2, max_nodes=12), st.data())
def test_ttl_n_equals_infinite(g, data):
    subs = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    pub = data.draw(st.integers(0, g.n - 1))
    seed = data.draw(st.integers(0, 2 ** 32))
    gamma = data.draw(st.floats(0, 1))
    assert run_ref(g, subs, pub, gamma, None, seed) == run_ref(g, subs, pub, gamma, g.n, seed)
