"""XOR payload algebra, the peeling decoder, and a centralized reference encoder.

A storage packet is the bytewise XOR of the source payloads named in its
id set; ids travel with the packet because the decoder has no other way to
learn the code structure. Decoding peels: any packet with exactly one
unresolved id reveals that source, which is then substituted out of every
other packet, possibly freeing more degree-1 packets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Mapping, Sequence

import numpy as np

from .errors import ParameterError
from .soliton import DegreeDistribution, sample_degree

DEFAULT_PAYLOAD_BYTES = 16


def zero_payload(length: int = DEFAULT_PAYLOAD_BYTES) -> bytes:
    return bytes(length)


def xor_payload(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ParameterError(f"payload length mismatch: {len(a)} vs {len(b)}")
    return bytes(x ^ y for x, y in zip(a, b))


def xor_many(payloads: Iterable[bytes], length: int) -> bytes:
    acc = bytearray(length)
    for p in payloads:
        if len(p) != length:
            raise ParameterError(f"payload length mismatch: {len(p)} vs {length}")
        for j, byte in enumerate(p):
            acc[j] ^= byte
    return bytes(acc)


@dataclass(frozen=True)
class StoragePacket:
    """XOR of the sources in `ids`; empty ids means the all-zero block."""

    ids: frozenset[int]
    payload: bytes

    @property
    def degree(self) -> int:
        return len(self.ids)

    def sorted_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.ids))


@dataclass(frozen=True)
class DecodeResult:
    success: bool
    recovered: Mapping[int, bytes]
    rounds: int


def peel_decode(packets: Sequence[StoragePacket], source_ids: Collection[int]) -> DecodeResult:
    """Run the peeling decoder; success iff every source id is recovered.

    Deterministic: when several packets have degree 1, the lowest packet
    index is peeled first. Failure (no degree-1 packet left before all
    sources resolve) is a normal outcome, not an error.
    """
    wanted = set(source_ids)
    for p in packets:
        stray = p.ids - wanted
        if stray:
            raise ParameterError(f"packet references unknown source ids {sorted(stray)}")

    ids = [set(p.ids) for p in packets]
    values = [bytearray(p.payload) for p in packets]
    by_source: dict[int, set[int]] = {s: set() for s in wanted}
    for idx, id_set in enumerate(ids):
        for s in id_set:
            by_source[s].add(idx)

    candidates = {idx for idx, id_set in enumerate(ids) if len(id_set) == 1}
    recovered: dict[int, bytes] = {}
    rounds = 0
    while candidates:
        idx = min(candidates)
        candidates.discard(idx)
        if len(ids[idx]) != 1:
            continue
        rounds += 1
        (source,) = ids[idx]
        value = bytes(values[idx])
        recovered[source] = value
        for other in list(by_source[source]):
            ids[other].discard(source)
            buf = values[other]
            for j, byte in enumerate(value):
                buf[j] ^= byte
            if len(ids[other]) == 1:
                candidates.add(other)
        by_source[source].clear()
    return DecodeResult(
        success=set(recovered) == wanted,
        recovered=recovered,
        rounds=rounds,
    )


def central_lt_encode(
    sources: Sequence[bytes],
    dist: DegreeDistribution,
    m: int,
    rng: np.random.Generator,
) -> list[StoragePacket]:
    """Produce m reference packets: degree from `dist`, ids uniform without replacement.

    Source ids are the indices 0..k-1 of the `sources` sequence.
    """
    if m < 1:
        raise ParameterError(f"packet count m={m} must be >= 1")
    k = len(sources)
    if dist.k != k:
        raise ParameterError(f"distribution is for k={dist.k} but {k} sources were given")
    length = len(sources[0])
    packets = []
    for _ in range(m):
        d = sample_degree(dist, rng)
        chosen = rng.choice(k, size=d, replace=False)
        ids = frozenset(int(c) for c in chosen)
        packets.append(StoragePacket(ids=ids, payload=xor_many((sources[c] for c in ids), length)))
    return packets
