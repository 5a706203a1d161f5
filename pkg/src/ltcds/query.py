"""Decoding-probability evaluation and experiment sweeps.

The headline metric is the successful decoding probability: the fraction
of uniformly drawn h-node query sets from which all k source payloads are
recovered bit-exactly. Enumerating all n-choose-h subsets is hopeless, so
a configurable number of Monte Carlo trials estimates the expectation,
reported together with a 95% normal-approximation halfwidth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .errors import ParameterError, SimulationError
from .ltcodec import peel_decode
from .netmodel import connected_rgg, select_sources
from .seeding import derive_seed, spawn_rng
from .soliton import IDEAL
from .walksim import RunConfig, StorageSnapshot, run

DEFAULT_TRIALS = 200


@dataclass(frozen=True)
class QueryPlan:
    h: int
    trials: int
    eta: float

    def __post_init__(self):
        if self.h < 1:
            raise ParameterError(f"queried-node count h={self.h} must be >= 1")
        if self.trials < 1:
            raise ParameterError(f"trials={self.trials} must be >= 1")


def make_plan(k: int, eta: float, trials: int = DEFAULT_TRIALS) -> QueryPlan:
    """Plan h = round(eta * k) queried nodes; the stored eta is exactly h/k."""
    h = max(1, int(round(eta * k)))
    return QueryPlan(h=h, trials=trials, eta=h / k)


@dataclass(frozen=True)
class PsEstimate:
    successes: int
    trials: int
    ps: float
    ci95: float


def _halfwidth(ps: float, trials: int) -> float:
    return 1.96 * math.sqrt(ps * (1.0 - ps) / trials)


def evaluate_ps(
    snapshot: StorageSnapshot,
    sources: Mapping[int, bytes],
    plan: QueryPlan,
    rng: np.random.Generator,
) -> PsEstimate:
    """Estimate the probability that a random h-subset decodes everything."""
    if plan.h > snapshot.n:
        raise ParameterError(f"cannot query h={plan.h} of n={snapshot.n} nodes")
    if set(sources) != set(snapshot.source_ids):
        raise ParameterError("ground-truth sources do not match the snapshot")
    source_ids = snapshot.source_ids
    successes = 0
    for _ in range(plan.trials):
        chosen = rng.choice(snapshot.n, size=plan.h, replace=False)
        result = peel_decode([snapshot.packets[int(v)] for v in chosen], source_ids)
        if result.success and all(result.recovered[s] == sources[s] for s in source_ids):
            successes += 1
    ps = successes / plan.trials
    return PsEstimate(successes=successes, trials=plan.trials, ps=ps, ci95=_halfwidth(ps, plan.trials))


@dataclass(frozen=True)
class SweepCell:
    """One grid point of a sweep: a full run configuration minus eta."""

    algorithm: str
    n: int
    k: int
    side_length: float
    dist_kind: str = IDEAL
    c0: float = 0.1
    delta: float = 0.5
    c1: float = 3.0
    c2: int = 50
    c3: float = 10.0
    payload_bytes: int = 16

    def label(self) -> str:
        return (
            f"{self.algorithm}/n={self.n}/k={self.k}/L={self.side_length:.10g}"
            f"/dist={self.dist_kind}/c0={self.c0:.10g}/delta={self.delta:.10g}"
            f"/c1={self.c1:.10g}/c2={self.c2}/c3={self.c3:.10g}"
        )

    def run_config(self, master_seed: int) -> RunConfig:
        return RunConfig(
            algorithm=self.algorithm,
            c1=self.c1,
            c2=self.c2,
            c3=self.c3,
            dist_kind=self.dist_kind,
            c0=self.c0,
            delta=self.delta,
            payload_bytes=self.payload_bytes,
            master_seed=master_seed,
        )


@dataclass(frozen=True)
class SweepConfig:
    cells: tuple[SweepCell, ...]
    etas: tuple[float, ...]
    trials: int = DEFAULT_TRIALS
    seeds: int = 1
    master_seed: int = 0


@dataclass(frozen=True)
class SweepRow:
    """One aggregated result row; matches the CSV schema exactly."""

    algorithm: str
    n: int
    k: int
    side_length: float
    dist: str
    c1: float
    c2: int
    c3: float
    eta: float
    h: int
    trials: int
    successes: int
    ps: float
    ci95: float
    seed_group: int
    feasible: bool = True


def run_cell(cell: SweepCell, master_seed: int, rep: int):
    """Execute one seeded run of a sweep cell.

    Returns (graph, snapshot, ground-truth sources). All randomness is
    drawn from streams derived from (master seed, cell label, replicate
    index), so cells and replicates never interact.
    """
    label = cell.label()
    g = connected_rgg(cell.n, cell.side_length, derive_seed(master_seed, label, rep), label="graph")
    src_rng = spawn_rng(master_seed, label, rep, "sources")
    source_ids = select_sources(g, cell.k, src_rng)
    payload_rng = spawn_rng(master_seed, label, rep, "payloads")
    sources = {s: payload_rng.bytes(cell.payload_bytes) for s in source_ids}
    walk_rng = spawn_rng(master_seed, label, rep, "walk")
    snapshot = run(g, sources, cell.run_config(master_seed), walk_rng)
    return g, snapshot, sources


def _evaluate_cell(config: SweepConfig, cell: SweepCell) -> list[SweepRow]:
    base = dict(
        algorithm=cell.algorithm,
        n=cell.n,
        k=cell.k,
        side_length=cell.side_length,
        dist=cell.dist_kind,
        c1=cell.c1,
        c2=cell.c2,
        c3=cell.c3,
        seed_group=config.master_seed,
    )
    plans = [make_plan(cell.k, eta, config.trials) for eta in config.etas]

    def infeasible_row(plan: QueryPlan) -> SweepRow:
        return SweepRow(
            **base,
            eta=plan.eta,
            h=plan.h,
            trials=0,
            successes=0,
            ps=float("nan"),
            ci95=float("nan"),
            feasible=False,
        )

    if cell.k > cell.n:
        return [infeasible_row(p) for p in plans]
    label = cell.label()
    feasible = [p.h <= cell.n for p in plans]
    successes = [0] * len(plans)
    if any(feasible):
        for rep in range(config.seeds):
            _g, snapshot, sources = run_cell(cell, config.master_seed, rep)
            for j, plan in enumerate(plans):
                if not feasible[j]:
                    continue
                q_rng = spawn_rng(config.master_seed, label, rep, "query", f"eta={plan.eta:.10g}")
                successes[j] += evaluate_ps(snapshot, sources, plan, q_rng).successes
    rows = []
    for j, plan in enumerate(plans):
        if not feasible[j]:
            rows.append(infeasible_row(plan))
            continue
        total = config.trials * config.seeds
        ps = successes[j] / total
        rows.append(
            SweepRow(
                **base,
                eta=plan.eta,
                h=plan.h,
                trials=total,
                successes=successes[j],
                ps=ps,
                ci95=_halfwidth(ps, total),
            )
        )
    return rows


def sweep(config: SweepConfig, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every (cell, eta) and aggregate successes across seeds.

    Rows come out in grid order regardless of scheduling, so a sweep with
    the same master seed is reproducible byte for byte.
    """
    if not config.cells or not config.etas:
        raise ParameterError("sweep grid is empty")
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_evaluate_cell, [config] * len(config.cells), config.cells))
    else:
        chunks = [_evaluate_cell(config, cell) for cell in config.cells]
    rows = [row for chunk in chunks for row in chunk]
    if rows and all(not r.feasible for r in rows):
        raise SimulationError("every sweep cell is infeasible (k > n or h > n)")
    return rows


def grid_cells(
    algorithms: Iterable[str],
    sizes: Iterable[tuple[int, int, float]],
    **cell_kwargs,
) -> tuple[SweepCell, ...]:
    """Cartesian product helper: sizes are (n, k, side_length) triples."""
    return tuple(
        SweepCell(algorithm=a, n=n, k=k, side_length=length, **cell_kwargs)
        for a, (n, k, length) in product(algorithms, sizes)
    )
