"""Discrete-round random-walk dissemination engine.

Both storage algorithms push each source packet through the network as a
simple random walk: in every synchronous round, each node holding packets
forwards the head-of-line packet of its FIFO queue to a uniformly random
neighbor. A node rules on each source id exactly once, accepting it with
probability (code degree / source count) and folding accepted payloads
into its storage block by XOR. Packets carry a hop counter; once a packet
has walked long enough to have covered the network (threshold of order
C * n * ln n), the next node that has already ruled on it discards it.

ltcds1 assumes every node knows n and k. ltcds2 does not: nodes first
watch the packet traffic, log per-source visit times, and stop once their
first-seen source has arrived C2 times, at which point they turn the log
into local estimates (n_hat, k_hat). Dissemination-with-acceptance then
proceeds exactly as in ltcds1 with k replaced by k_hat and the discard
threshold by C3 * n_hat * ln(n_hat), both per receiving node. The engine
starts the encoding stage (and the packets' dissemination counters) once
the whole network has finished estimating, so the discard budget is spent
on dissemination rather than on the measurement traffic; per-node
estimates stay purely local.

Determinism contract: every run is a single sequential event loop; given
the same graph, sources, parameters, and seed, the resulting snapshot is
bit-identical. Within a round, sends are executed in ascending sender id
and arrivals are processed in ascending (sender id, source id).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ParameterError, SimulationError
from .estimation import compute_estimates
from .ltcodec import StoragePacket
from .netmodel import Graph, is_connected
from .soliton import (
    IDEAL,
    ROBUST,
    DegreeDistribution,
    ideal_soliton,
    robust_soliton,
    sample_degree,
    sample_degrees,
)

LTCDS1 = "ltcds1"
LTCDS2 = "ltcds2"


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one dissemination run (see cli for file parsing)."""

    algorithm: str
    c1: float = 3.0
    c2: int = 50
    c3: float = 10.0
    dist_kind: str = IDEAL
    c0: float = 0.1
    delta: float = 0.5
    payload_bytes: int = 16
    master_seed: int = 0

    def __post_init__(self):
        if self.algorithm not in (LTCDS1, LTCDS2):
            raise ParameterError(f"unknown algorithm {self.algorithm!r}")
        if self.c1 <= 0:
            raise ParameterError(f"c1={self.c1} must be positive")
        if self.c2 < 1 or self.c2 != int(self.c2):
            raise ParameterError(f"c2={self.c2} must be an integer >= 1")
        if self.c3 <= 0:
            raise ParameterError(f"c3={self.c3} must be positive")
        if self.dist_kind not in (IDEAL, ROBUST):
            raise ParameterError(f"unknown distribution kind {self.dist_kind!r}")


@dataclass(frozen=True)
class StorageSnapshot:
    """Immutable outcome of a run: final per-node storage plus statistics."""

    algorithm: str
    n: int
    k: int
    side_length: float
    source_ids: tuple[int, ...]
    packets: tuple[StoragePacket, ...]
    code_degrees: tuple[int, ...]
    transmissions: int
    rounds: int
    final_counters: Mapping[int, int]
    counter_threshold: int | None = None
    node_thresholds: tuple[int, ...] | None = None
    n_hat: tuple[float, ...] | None = None
    k_hat: tuple[int, ...] | None = None
    decided_counts: tuple[int, ...] = ()
    inference_rounds: int = 0
    inference_transmissions: int = 0


class _Packet:
    __slots__ = ("src", "counter")

    def __init__(self, src: int):
        self.src = src
        self.counter = 0


def _check_inputs(g: Graph, sources: Mapping[int, bytes]) -> int:
    if not is_connected(g):
        raise SimulationError("graph is disconnected; the walk would not cover it")
    if not sources:
        raise ParameterError("need at least one source")
    if len(sources) > g.n:
        raise ParameterError(f"k={len(sources)} sources exceed n={g.n} nodes")
    lengths = {len(p) for p in sources.values()}
    if len(lengths) != 1:
        raise ParameterError(f"source payloads have mixed lengths {sorted(lengths)}")
    for s in sources:
        if not 0 <= s < g.n:
            raise ParameterError(f"source id {s} is not a node id")
    return lengths.pop()


class _Engine:
    """Shared queue/forwarding machinery; subclasses differ in receive()."""

    def __init__(self, g: Graph, sources: Mapping[int, bytes], rng: np.random.Generator):
        self.payload_len = _check_inputs(g, sources)
        self.g = g
        self.n = g.n
        self.adj = g.adjacency
        self.rng = rng
        self.source_ids = tuple(sorted(sources))
        self.k = len(self.source_ids)
        self.src_val = {s: int.from_bytes(sources[s], "big") for s in self.source_ids}
        self.queues: list[deque[_Packet]] = [deque() for _ in range(self.n)]
        self.active: set[int] = set()
        self.storage_ids: list[set[int]] = [set() for _ in range(self.n)]
        self.storage_val = [0] * self.n
        self.decided: list[set[int]] = [set() for _ in range(self.n)]
        self.live = 0
        self.final_counters: dict[int, int] = {}
        self.transmissions = 0
        self.rounds = 0

    # -- queue plumbing -------------------------------------------------

    def _enqueue(self, v: int, pkt: _Packet) -> None:
        self.queues[v].append(pkt)
        self.active.add(v)

    def _send_round(self) -> list[tuple[int, int, int, _Packet]]:
        """One synchronous round of head-of-line forwarding."""
        senders = sorted(self.active)
        draws = self.rng.random(len(senders))
        arrivals = []
        for i, u in enumerate(senders):
            q = self.queues[u]
            pkt = q.popleft()
            if not q:
                self.active.discard(u)
            nbrs = self.adj[u]
            v = nbrs[int(draws[i] * len(nbrs))]
            arrivals.append((u, pkt.src, v, pkt))
        return arrivals

    def _initial_sends(self) -> list[tuple[int, int, int, _Packet]]:
        draws = self.rng.random(self.k)
        arrivals = []
        for i, s in enumerate(self.source_ids):
            nbrs = self.adj[s]
            if not nbrs:
                raise SimulationError(f"source node {s} has no neighbors")
            v = nbrs[int(draws[i] * len(nbrs))]
            arrivals.append((s, s, v, _Packet(s)))
            self.live += 1
        return arrivals

    def _discard(self, pkt: _Packet) -> None:
        self.live -= 1
        self.final_counters[pkt.src] = pkt.counter

    def _count_hop(self, pkt: _Packet) -> None:
        pkt.counter += 1
        self.transmissions += 1

    def _accept(self, v: int, src: int) -> None:
        self.storage_ids[v].add(src)
        self.storage_val[v] ^= self.src_val[src]

    def storage_packets(self) -> tuple[StoragePacket, ...]:
        return tuple(
            StoragePacket(
                ids=frozenset(self.storage_ids[v]),
                payload=self.storage_val[v].to_bytes(self.payload_len, "big"),
            )
            for v in range(self.n)
        )


class _LtcdsI(_Engine):
    def __init__(self, g, sources, dist: DegreeDistribution, c1: float, rng):
        super().__init__(g, sources, rng)
        if dist.k != self.k:
            raise ParameterError(f"distribution is for k={dist.k}, run has k={self.k}")
        if c1 <= 0:
            raise ParameterError(f"c1={c1} must be positive")
        self.threshold = math.ceil(c1 * self.n * math.log(self.n))
        self.dc = sample_degrees(dist, self.n, rng)
        self.accept_prob = self.dc / self.k

    def _receive(self, v: int, pkt: _Packet) -> None:
        src = pkt.src
        if src not in self.decided[v]:
            self.decided[v].add(src)
            self._count_hop(pkt)
            if self.rng.random() <= self.accept_prob[v]:
                self._accept(v, src)
            self._enqueue(v, pkt)
        elif pkt.counter < self.threshold:
            self._count_hop(pkt)
            self._enqueue(v, pkt)
        else:
            self._discard(pkt)

    def run(self) -> None:
        for _, _, v, pkt in self._initial_sends():
            self._receive(v, pkt)
        while self.live:
            self.rounds += 1
            for _, _, v, pkt in self._send_round():
                self._receive(v, pkt)


def run_ltcds_i(
    g: Graph,
    sources: Mapping[int, bytes],
    dist: DegreeDistribution,
    c1: float,
    rng: np.random.Generator,
) -> StorageSnapshot:
    """Disseminate and store with known n and k."""
    eng = _LtcdsI(g, sources, dist, c1, rng)
    eng.run()
    return StorageSnapshot(
        algorithm=LTCDS1,
        n=eng.n,
        k=eng.k,
        side_length=g.side_length,
        source_ids=eng.source_ids,
        packets=eng.storage_packets(),
        code_degrees=tuple(int(d) for d in eng.dc),
        transmissions=eng.transmissions,
        rounds=eng.rounds,
        final_counters=dict(eng.final_counters),
        counter_threshold=eng.threshold,
        decided_counts=tuple(len(d) for d in eng.decided),
    )


class _LtcdsII(_Engine):
    def __init__(self, g, sources, dist_kind: str, c2: int, c3: float, rng, c0: float, delta: float):
        super().__init__(g, sources, rng)
        if c2 < 2:
            raise ParameterError(f"c2={c2} must be >= 2 (an interval needs two visits)")
        if c3 <= 0:
            raise ParameterError(f"c3={c3} must be positive")
        if dist_kind not in (IDEAL, ROBUST):
            raise ParameterError(f"unknown distribution kind {dist_kind!r}")
        self.dist_kind = dist_kind
        self.c2 = c2
        self.c3 = c3
        self.c0 = c0
        self.delta = delta
        self.monitoring = [True] * self.n
        self.first_source: list[int | None] = [None] * self.n
        self.visit_log: list[dict[int, list[int]]] = [{} for _ in range(self.n)]
        self.n_hat = [0.0] * self.n
        self.k_hat = [0] * self.n
        self.dc = [0] * self.n
        self.accept_prob = [0.0] * self.n
        self.thresholds = [0] * self.n
        self.ready = 0
        self.inference_rounds = 0
        self.inference_transmissions = 0
        self._dist_cache: dict[int, DegreeDistribution] = {}
        self.round_cap = 100 * math.ceil(c3 * self.n * math.log(self.n))

    def _dist_for(self, k_hat: int) -> DegreeDistribution:
        dist = self._dist_cache.get(k_hat)
        if dist is None:
            if self.dist_kind == ROBUST and k_hat >= 2:
                try:
                    dist = robust_soliton(k_hat, self.c0, self.delta)
                except ParameterError:
                    dist = ideal_soliton(k_hat)
            else:
                dist = ideal_soliton(k_hat)
            self._dist_cache[k_hat] = dist
        return dist

    def _receive_inference(self, v: int, pkt: _Packet, now: int) -> None:
        src = pkt.src
        if self.monitoring[v]:
            if self.first_source[v] is None:
                self.first_source[v] = src
            times = self.visit_log[v].setdefault(src, [])
            times.append(now)
            if src == self.first_source[v] and len(times) == self.c2:
                self._finish_inference(v)
        self.inference_transmissions += 1
        self._enqueue(v, pkt)

    def _finish_inference(self, v: int) -> None:
        self.monitoring[v] = False
        est = compute_estimates(self.visit_log[v])
        self.n_hat[v] = est.n_hat
        self.k_hat[v] = est.k_hat
        self.dc[v] = sample_degree(self._dist_for(est.k_hat), self.rng)
        self.accept_prob[v] = self.dc[v] / est.k_hat
        self.thresholds[v] = math.ceil(self.c3 * est.n_hat * math.log(max(est.n_hat, 1.0)))
        self.ready += 1

    def _receive_encoding(self, v: int, pkt: _Packet) -> None:
        src = pkt.src
        if src not in self.decided[v]:
            self.decided[v].add(src)
            self._count_hop(pkt)
            if len(self.decided[v]) <= self.k_hat[v]:
                if self.rng.random() <= self.accept_prob[v]:
                    self._accept(v, src)
            self._enqueue(v, pkt)
        elif pkt.counter < self.thresholds[v]:
            self._count_hop(pkt)
            self._enqueue(v, pkt)
        else:
            self._discard(pkt)

    def run(self) -> None:
        for _, _, v, pkt in self._initial_sends():
            self._receive_inference(v, pkt, 0)
        while self.ready < self.n:
            self.rounds += 1
            if self.rounds > self.round_cap:
                stuck = sum(1 for m in self.monitoring if m)
                raise SimulationError(
                    f"round cap {self.round_cap} hit with {stuck} node(s) still estimating; "
                    f"c2={self.c2} is too large for this graph"
                )
            for _, _, v, pkt in self._send_round():
                self._receive_inference(v, pkt, self.rounds)
        self.inference_rounds = self.rounds
        # Estimation traffic is over; dissemination budgets start here.
        while self.live:
            self.rounds += 1
            if self.rounds > self.round_cap:
                raise SimulationError(
                    f"round cap {self.round_cap} hit with {self.live} packet(s) still live"
                )
            for _, _, v, pkt in self._send_round():
                self._receive_encoding(v, pkt)


def run_ltcds_ii(
    g: Graph,
    sources: Mapping[int, bytes],
    dist_kind: str,
    c2: int,
    c3: float,
    rng: np.random.Generator,
    *,
    c0: float = 0.1,
    delta: float = 0.5,
) -> StorageSnapshot:
    """Disseminate and store with locally estimated n and k."""
    eng = _LtcdsII(g, sources, dist_kind, c2, c3, rng, c0, delta)
    eng.run()
    return StorageSnapshot(
        algorithm=LTCDS2,
        n=eng.n,
        k=eng.k,
        side_length=g.side_length,
        source_ids=eng.source_ids,
        packets=eng.storage_packets(),
        code_degrees=tuple(eng.dc),
        transmissions=eng.transmissions,
        rounds=eng.rounds,
        final_counters=dict(eng.final_counters),
        node_thresholds=tuple(eng.thresholds),
        n_hat=tuple(eng.n_hat),
        k_hat=tuple(eng.k_hat),
        decided_counts=tuple(len(d) for d in eng.decided),
        inference_rounds=eng.inference_rounds,
        inference_transmissions=eng.inference_transmissions,
    )


def run(
    g: Graph,
    sources: Mapping[int, bytes],
    config: RunConfig,
    rng: np.random.Generator,
) -> StorageSnapshot:
    """Dispatch a run per its configuration."""
    if config.algorithm == LTCDS1:
        k = len(sources)
        if config.dist_kind == ROBUST and k >= 2:
            dist = robust_soliton(k, config.c0, config.delta)
        else:
            dist = ideal_soliton(k)
        return run_ltcds_i(g, sources, dist, config.c1, rng)
    return run_ltcds_ii(
        g,
        sources,
        config.dist_kind,
        config.c2,
        config.c3,
        rng,
        c0=config.c0,
        delta=config.delta,
    )


def run_update(
    snapshot: StorageSnapshot,
    g: Graph,
    updates: Mapping[int, tuple[bytes, bytes]],
    c1: float,
    rng: np.random.Generator,
) -> StorageSnapshot:
    """Propagate per-source data changes through the finished storage.

    Each update walks one packet carrying the old-XOR-new difference block;
    every node whose accepted-id list contains the source folds the block
    into its storage once. Nodes not holding the id just forward.
    """
    if c1 <= 0:
        raise ParameterError(f"c1={c1} must be positive")
    if not is_connected(g):
        raise SimulationError("graph is disconnected; the walk would not cover it")
    if g.n != snapshot.n:
        raise ParameterError("graph does not match the snapshot")
    for s in updates:
        if s not in snapshot.source_ids:
            raise ParameterError(f"update for unknown source id {s}")

    payload_len = len(snapshot.packets[0].payload)
    storage_val = [int.from_bytes(p.payload, "big") for p in snapshot.packets]
    threshold = math.ceil(c1 * g.n * math.log(g.n))
    total_sent = 0
    longest_walk = 0

    for s in sorted(updates):
        old, new = updates[s]
        if len(old) != payload_len or len(new) != payload_len:
            raise ParameterError(f"update payloads for source {s} must be {payload_len} bytes")
        diff = int.from_bytes(old, "big") ^ int.from_bytes(new, "big")
        applied: set[int] = set()
        node = s
        counter = 0
        while True:
            if s in snapshot.packets[node].ids and node not in applied:
                storage_val[node] ^= diff
                applied.add(node)
            if counter >= threshold:
                break
            nbrs = g.adjacency[node]
            node = nbrs[int(rng.random() * len(nbrs))]
            counter += 1
        total_sent += counter
        longest_walk = max(longest_walk, counter)

    packets = tuple(
        StoragePacket(ids=p.ids, payload=storage_val[v].to_bytes(payload_len, "big"))
        for v, p in enumerate(snapshot.packets)
    )
    return StorageSnapshot(
        algorithm=snapshot.algorithm,
        n=snapshot.n,
        k=snapshot.k,
        side_length=snapshot.side_length,
        source_ids=snapshot.source_ids,
        packets=packets,
        code_degrees=snapshot.code_degrees,
        transmissions=total_sent,
        rounds=longest_walk,
        final_counters={s: threshold for s in sorted(updates)},
        counter_threshold=threshold,
        n_hat=snapshot.n_hat,
        k_hat=snapshot.k_hat,
        decided_counts=snapshot.decided_counts,
    )


@dataclass(frozen=True)
class WalkStatistics:
    """Empirical single-walk statistics, one entry per node."""

    steps: int
    visit_counts: np.ndarray
    visit_frequency: np.ndarray
    return_counts: np.ndarray
    mean_return_time: np.ndarray  # nan where a node saw no completed return


def measure_walk_statistics(g: Graph, steps: int, rng: np.random.Generator) -> WalkStatistics:
    """Run one simple random walk and tally visits and return gaps."""
    if steps < 10**5:
        raise ParameterError(f"steps={steps} too small for stable statistics, need >= 1e5")
    if not is_connected(g):
        raise SimulationError("graph is disconnected; the walk would not cover it")
    visits = np.zeros(g.n, dtype=np.int64)
    returns = np.zeros(g.n, dtype=np.int64)
    gap_sum = np.zeros(g.n, dtype=np.float64)
    last_seen = [-1] * g.n
    adj = g.adjacency
    node = int(rng.integers(g.n))
    chunk = 1 << 16
    done = 0
    while done < steps:
        batch = min(chunk, steps - done)
        draws = rng.random(batch)
        for i in range(batch):
            t = done + i + 1
            nbrs = adj[node]
            node = nbrs[int(draws[i] * len(nbrs))]
            visits[node] += 1
            prev = last_seen[node]
            if prev >= 0:
                returns[node] += 1
                gap_sum[node] += t - prev
            last_seen[node] = t
        done += batch
    with np.errstate(invalid="ignore"):
        mean_return = np.where(returns > 0, gap_sum / np.maximum(returns, 1), np.nan)
    return WalkStatistics(
        steps=steps,
        visit_counts=visits,
        visit_frequency=visits / steps,
        return_counts=returns,
        mean_return_time=mean_return,
    )
