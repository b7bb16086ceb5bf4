"""Discrete-event simulation of the subscription and dissemination protocols.

Two dissemination paths consume the random stream identically:
:func:`disseminate` walks per-node state objects message by message and can
record a full trace; :func:`disseminate_fast` runs the same FIFO loop
compiled with numba on the CSR arrays. Given the same generator state both
return the same result.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import InvalidPublisher, TooLarge
from .overlay import OverlayGraph

ORIGIN = -1
INF_TTL = np.iinfo(np.int64).max
ORACLE_MAX_LINKS = 24


@dataclass
class NodeState:
    id: int
    is_subscriber: bool = False
    neighbor_subs: dict = field(default_factory=dict)
    handled: set = field(default_factory=set)


@dataclass(frozen=True)
class EventMessage:
    event_id: int
    ttl: int
    sender: int = ORIGIN


@dataclass(frozen=True)
class DisseminationResult:
    receivers: int
    subscribers_reached: int
    messages_sent: int
    max_hops: int


@dataclass
class Trace:
    hops: dict = field(default_factory=dict)         # node -> hop at first processing
    ttl_after: dict = field(default_factory=dict)    # node -> ttl after decrement
    parent: dict = field(default_factory=dict)       # node -> sender of the processed copy
    sends: list = field(default_factory=list)        # (sender, receiver, ttl carried)
    processed: list = field(default_factory=list)    # nodes in processing order


def _ttl(ttl0):
    if ttl0 is None:
        return INF_TTL
    ttl0 = int(ttl0)
    if ttl0 < 0:
        raise ValueError("ttl must be nonnegative")
    return ttl0


def assign_subscriptions(graph: OverlayGraph, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must be a probability")
    return rng.random(graph.n) < sigma


# subscription protocol

def _deliver_control(states, queue):
    while queue:
        kind, sender, receiver = queue.popleft()
        if kind == "subscription":
            states[receiver].neighbor_subs[sender] = True
        else:
            states[receiver].neighbor_subs[sender] = False


def _announce(states, graph, node, kind):
    queue = deque((kind, node, int(m)) for m in graph.neighbors(node))
    _deliver_control(states, queue)


def subscription_phase(graph: OverlayGraph, subs) -> list[NodeState]:
    """Create node states and let every subscriber announce itself."""
    states = [NodeState(u, bool(subs[u]), {int(v): False for v in graph.neighbors(u)})
              for u in range(graph.n)]
    for u in range(graph.n):
        if states[u].is_subscriber:
            _announce(states, graph, u, "subscription")
    return states


def subscribe(states, graph: OverlayGraph, node: int) -> None:
    states[node].is_subscriber = True
    _announce(states, graph, node, "subscription")


def unsubscribe(states, graph: OverlayGraph, node: int) -> None:
    states[node].is_subscriber = False
    _announce(states, graph, node, "remove")


def arc_match_flags(graph: OverlayGraph, states) -> np.ndarray:
    """Per CSR arc u->v: does u's cache say v is a matching subscriber."""
    flags = np.zeros(graph.indices.size, dtype=np.bool_)
    for u in range(graph.n):
        cache = states[u].neighbor_subs
        lo = graph.indptr[u]
        for k, v in enumerate(graph.neighbors(u)):
            flags[lo + k] = cache[int(v)]
    return flags


def arc_flags_from_subs(graph: OverlayGraph, subs) -> np.ndarray:
    """Arc flags for fully propagated caches (equivalent to a completed subscription phase)."""
    return np.asarray(subs, dtype=np.bool_)[graph.indices]


# dissemination

def disseminate(graph: OverlayGraph, states, subs, publisher: int, gamma: float,
                ttl0=None, rng: np.random.Generator | None = None,
                event_id: int = 0, trace: Trace | None = None) -> DisseminationResult:
    """Publish one event and run the dissemination protocol to quiescence.

    Messages are processed in FIFO order. A node drops a message if it
    already handled the event or the TTL is 0; otherwise it decrements the
    TTL, sends to every neighbour (except the sender) its cache marks as
    subscribed, then gossips to each remaining neighbour with probability
    ``gamma``. One uniform is drawn per gossip candidate, in adjacency order.
    """
    if not 0 <= publisher < graph.n:
        raise InvalidPublisher(f"publisher {publisher} not in 0..{graph.n - 1}")
    if rng is None:
        rng = np.random.default_rng()
    queue = deque([(EventMessage(event_id, _ttl(ttl0), ORIGIN), publisher, 0)])
    receivers = reached = messages = max_hops = 0
    while queue:
        msg, node, hop = queue.popleft()
        st = states[node]
        if event_id in st.handled or msg.ttl == 0:
            continue
        st.handled.add(event_id)
        receivers += 1
        reached += bool(subs[node])
        max_hops = max(max_hops, hop)
        ttl = msg.ttl - 1
        nbrs = [int(v) for v in graph.neighbors(node) if v != msg.sender]
        matching = [v for v in nbrs if st.neighbor_subs[v]]
        others = [v for v in nbrs if not st.neighbor_subs[v]]
        targets = matching + [v for v in others if rng.random() < gamma]
        if trace is not None:
            trace.hops[node] = hop
            trace.ttl_after[node] = ttl
            trace.parent[node] = msg.sender
            trace.processed.append(node)
        for v in targets:
            queue.append((EventMessage(event_id, ttl, node), v, hop + 1))
            messages += 1
            if trace is not None:
                trace.sends.append((node, v, ttl))
    return DisseminationResult(receivers, reached, messages, max_hops)


@numba.njit(cache=True)
def _spread(indptr, indices, arc_match, subs, publisher, gamma, ttl0,
            rng, arc_u, use_arc_u):
    n = indptr.size - 1
    hop = np.full(n, -1, dtype=np.int64)
    cap = indices.size + 1
    q_node = np.empty(cap, dtype=np.int64)
    q_from = np.empty(cap, dtype=np.int64)
    q_ttl = np.empty(cap, dtype=np.int64)
    q_hop = np.empty(cap, dtype=np.int64)
    q_node[0] = publisher
    q_from[0] = -1
    q_ttl[0] = ttl0
    q_hop[0] = 0
    head = 0
    tail = 1
    receivers = 0
    reached = 0
    messages = 0
    max_hops = 0
    while head < tail:
        node = q_node[head]
        sender = q_from[head]
        ttl = q_ttl[head]
        h = q_hop[head]
        head += 1
        if hop[node] >= 0 or ttl == 0:
            continue
        hop[node] = h
        receivers += 1
        if subs[node]:
            reached += 1
        if h > max_hops:
            max_hops = h
        ttl -= 1
        lo = indptr[node]
        hi = indptr[node + 1]
        for a in range(lo, hi):
            v = indices[a]
            if v != sender and arc_match[a]:
                q_node[tail] = v
                q_from[tail] = node
                q_ttl[tail] = ttl
                q_hop[tail] = h + 1
                tail += 1
                messages += 1
        for a in range(lo, hi):
            v = indices[a]
            if v == sender or arc_match[a]:
                continue
            if use_arc_u:
                u = arc_u[a]
            else:
                u = rng.random()
            if u < gamma:
                q_node[tail] = v
                q_from[tail] = node
                q_ttl[tail] = ttl
                q_hop[tail] = h + 1
                tail += 1
                messages += 1
    return receivers, reached, messages, max_hops, hop


@numba.njit(cache=True)
def _spread_many(indptr, indices, arc_match, subs, publisher, gamma, ttl0, rng, trials):
    out = np.empty(trials, dtype=np.int64)
    dummy = np.empty(0)
    for t in range(trials):
        r, _, _, _, _ = _spread(indptr, indices, arc_match, subs, publisher,
                                gamma, ttl0, rng, dummy, False)
        out[t] = r
    return out


_EMPTY = np.empty(0)


def _prep(graph, arc_match, subs, publisher):
    if not 0 <= publisher < graph.n:
        raise InvalidPublisher(f"publisher {publisher} not in 0..{graph.n - 1}")
    return (np.ascontiguousarray(arc_match, dtype=np.bool_),
            np.ascontiguousarray(subs, dtype=np.bool_))


def disseminate_fast(graph: OverlayGraph, arc_match, subs, publisher: int, gamma: float,
                     ttl0=None, rng: np.random.Generator | None = None,
                     return_hops: bool = False):
    arc_match, subs = _prep(graph, arc_match, subs, publisher)
    if rng is None:
        rng = np.random.default_rng()
    r, s, m, h, hop = _spread(graph.indptr, graph.indices, arc_match, subs, int(publisher),
                              float(gamma), _ttl(ttl0), rng, _EMPTY, False)
    res = DisseminationResult(int(r), int(s), int(m), int(h))
    return (res, hop) if return_hops else res


def disseminate_coupled(graph: OverlayGraph, arc_match, subs, publisher: int, gamma: float,
                        arc_uniforms, ttl0=None):
    """Dissemination where arc u->v gossips iff ``arc_uniforms[arc] < gamma``.

    Sharing one uniform per arc across gamma values couples the runs, so the
    set of receivers can only grow with gamma. Returns (result, hop array).
    """
    arc_match, subs = _prep(graph, arc_match, subs, publisher)
    u = np.ascontiguousarray(arc_uniforms, dtype=np.float64)
    if u.size != graph.indices.size:
        raise ValueError("need one uniform per arc")
    r, s, m, h, hop = _spread(graph.indptr, graph.indices, arc_match, subs, int(publisher),
                              float(gamma), _ttl(ttl0), np.random.default_rng(0), u, True)
    return DisseminationResult(int(r), int(s), int(m), int(h)), hop


def receivers_monte_carlo(graph: OverlayGraph, subs, publisher: int, gamma: float,
                          trials: int, rng: np.random.Generator, ttl0=None) -> np.ndarray:
    """Receiver counts of ``trials`` independent events from one publisher."""
    subs = np.asarray(subs, dtype=np.bool_)
    arc_match, subs = _prep(graph, arc_flags_from_subs(graph, subs), subs, publisher)
    return _spread_many(graph.indptr, graph.indices, arc_match, subs, int(publisher),
                        float(gamma), _ttl(ttl0), rng, int(trials))


# exact oracle for small graphs

def gossip_links(graph: OverlayGraph, subs) -> list[tuple[int, int]]:
    """Directed links u->v whose use is a gossip coin flip (v not a subscriber)."""
    return [(u, int(v)) for u in range(graph.n) for v in graph.neighbors(u) if not subs[v]]


def smallgraph_oracle(graph: OverlayGraph, subs, publisher: int, gamma: float) -> np.ndarray:
    """Exact PMF of the receiver count (index = count), infinite TTL.

    Every gossip link is an independent Bernoulli(gamma) coin; links into
    subscribers are always open. The final receiver set is the set reachable
    from the publisher over open links. Coins are flipped lazily, only when
    the link leads from a reached node to an unreached one, which sums the
    2^k outcomes exactly while skipping coins that cannot matter.
    """
    if not 0 <= publisher < graph.n:
        raise InvalidPublisher(f"publisher {publisher} not in 0..{graph.n - 1}")
    k = len(gossip_links(graph, subs))
    if k > ORACLE_MAX_LINKS:
        raise TooLarge(f"{k} gossip links > {ORACLE_MAX_LINKS}")
    subs = [bool(s) for s in subs]
    adj = graph.adjacency
    pmf = np.zeros(graph.n + 1)

    def out_links(u):
        return [(u, v) for v in adj[u]]

    # explicit stack of (reached set, pending links, weight)
    stack = [(frozenset([publisher]), tuple(out_links(publisher)), 1.0)]
    while stack:
        reached, pending, w = stack.pop()
        if w == 0.0:
            continue
        pending = list(pending)
        while pending:
            u, v = pending.pop()
            if v in reached:
                continue
            if subs[v]:
                reached = reached | {v}
                pending.extend(out_links(v))
                continue
            stack.append((reached | {v}, tuple(pending + out_links(v)), w * gamma))
            w *= 1.0 - gamma
            if w == 0.0:
                break
        else:
            pmf[len(reached)] += w
    return pmf


def enumerate_oracle(graph: OverlayGraph, subs, publisher: int, gamma: float) -> np.ndarray:
    """Receiver-count PMF by literally enumerating every outcome of all gossip links.

    Exponential in the number of gossip links; meant for cross-checking.
    """
    links = gossip_links(graph, subs)
    k = len(links)
    if k > ORACLE_MAX_LINKS:
        raise TooLarge(f"{k} gossip links > {ORACLE_MAX_LINKS}")
    index = {lk: i for i, lk in enumerate(links)}
    adj = graph.adjacency
    pmf = np.zeros(graph.n + 1)
    for mask in range(1 << k):
        ones = bin(mask).count("1")
        w = gamma ** ones * (1.0 - gamma) ** (k - ones)
        if w == 0.0:
            continue
        seen = {publisher}
        todo = [publisher]
        while todo:
            u = todo.pop()
            for v in adj[u]:
                if v in seen:
                    continue
                i = index.get((u, v))
                if i is None or mask >> i & 1:
                    seen.add(v)
                    todo.append(v)
        pmf[len(seen)] += w
    return pmf
