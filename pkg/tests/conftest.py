"""Shared test helpers: hand-built graphs and the GF(2) elimination oracle."""

from __future__ import annotations

import numpy as np

from ltcds.netmodel import Graph, graph_from_positions


def graph_from_points(points, side_length=10.0) -> Graph:
    return graph_from_positions(np.array(points, dtype=float), side_length)


def path2(gap: float = 0.5) -> Graph:
    return graph_from_points([[0.0, 0.0], [gap, 0.0]], side_length=2.0)


def gf2_solve(packets, source_ids, payload_len):
    """Independent decoder: full Gaussian elimination over GF(2).

    Returns {source id: payload bytes} when the system determines every
    source, else None. Strictly stronger than peeling, so peeling success
    must imply success here.
    """
    ids = sorted(source_ids)
    pos = {s: i for i, s in enumerate(ids)}
    k = len(ids)
    pivots: dict[int, tuple[int, int]] = {}
    for p in packets:
        mask = 0
        for s in p.ids:
            mask |= 1 << pos[s]
        val = int.from_bytes(p.payload, "big")
        while mask:
            top = mask.bit_length() - 1
            if top in pivots:
                pmask, pval = pivots[top]
                mask ^= pmask
                val ^= pval
            else:
                pivots[top] = (mask, val)
                break
    if len(pivots) < k:
        return None
    values: dict[int, int] = {}
    for bit in sorted(pivots):
        mask, val = pivots[bit]
        for b in range(bit):
            if (mask >> b) & 1:
                val ^= values[b]
        values[bit] = val
    return {ids[b]: values[b].to_bytes(payload_len, "big") for b in range(k)}
