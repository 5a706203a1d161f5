"""Network-size and source-count estimation from visit-time logs.

During dissemination each node logs the round at which each source packet
visits it. For a single walk, the mean gap between consecutive returns to
a node estimates (mean degree * n / node degree); dropping the local
degree correction, the mean inter-visit time itself serves as the estimate
of n. The mean gap between consecutive arrivals of *any* packet shrinks by
a factor of k, so the ratio of the two estimates k. The n estimate
inherits the bias of the dropped degree correction on purpose; the k
estimate, being a ratio, does not, which is why it concentrates better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ParameterError

VisitLog = Mapping[int, Sequence[float]]


class InsufficientVisits(Exception):
    """Raised when a source has fewer than two recorded visits."""


@dataclass(frozen=True)
class Estimates:
    mean_intervisit: float
    mean_interpacket: float
    n_hat: float
    k_hat: int
    sources_seen: int


def per_source_intervisit(log: VisitLog, source_id: int) -> float:
    """Mean gap between consecutive visits of one source: span / (visits - 1)."""
    times = log[source_id]
    if len(times) < 2:
        raise InsufficientVisits(f"source {source_id} has {len(times)} visit(s), need >= 2")
    return (times[-1] - times[0]) / (len(times) - 1)


def compute_estimates(log: VisitLog) -> Estimates:
    """Aggregate a node's visit log into (n_hat, k_hat).

    Sources with a single visit still count toward sources_seen and toward
    the inter-packet visit total, but contribute no inter-visit sample.
    """
    if not log:
        raise ParameterError("empty visit log")
    intervisits = []
    t_first = None
    t_last = None
    total_visits = 0
    for source_id, times in log.items():
        if not times:
            continue
        total_visits += len(times)
        t_first = times[0] if t_first is None else min(t_first, times[0])
        t_last = times[-1] if t_last is None else max(t_last, times[-1])
        if len(times) >= 2:
            intervisits.append(per_source_intervisit(log, source_id))
    if not intervisits:
        raise ParameterError("no source has two or more visits; cannot estimate")
    mean_intervisit = sum(intervisits) / len(intervisits)
    if total_visits >= 2:
        mean_interpacket = (t_last - t_first) / (total_visits - 1)
    else:
        mean_interpacket = mean_intervisit
    k_hat = max(1, int(round(mean_intervisit / mean_interpacket))) if mean_interpacket > 0 else 1
    return Estimates(
        mean_intervisit=mean_intervisit,
        mean_interpacket=mean_interpacket,
        n_hat=mean_intervisit,
        k_hat=k_hat,
        sources_seen=sum(1 for times in log.values() if times),
    )
