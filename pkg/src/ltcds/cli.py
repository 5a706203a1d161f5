"""Command-line front end: config parsing, seeding, and CSV emission.

Commands
--------
run        one full dissemination run; per-node summary CSV (+ optional
           storage dump)
sweep      decoding-probability grid; CSV with schema
           algorithm,n,k,L,dist,c1,c2,c3,eta,h,trials,successes,ps,ci95,seed_group
estimate   per-node estimates CSV (node_id,dn_u,n_hat,k_hat), ltcds2 only
dump-dist  degree,probability CSV of a code-degree distribution, or of the
           induced storage-degree law with --induced

Configs are flat key = value files ('#' starts a comment). One master seed
governs everything; all per-run randomness is derived from it (see
seeding.derive_seed), so outputs are byte-identical across repeats.

Exit codes: 0 success, 2 config error, 3 runtime error, 4 sweep with only
infeasible cells.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .errors import ParameterError, SimulationError
from .query import SweepCell, SweepConfig, SweepRow, run_cell, sweep
from .soliton import IDEAL, ROBUST, ideal_soliton, robust_soliton, storage_degree_pmf
from .walksim import LTCDS1, LTCDS2, StorageSnapshot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_INFEASIBLE = 4

_DEFAULTS = {
    "distribution": IDEAL,
    "c0": "0.1",
    "delta": "0.5",
    "c1": "3",
    "c2": "50",
    "c3": "10",
    "payload_bytes": "16",
    "trials": "200",
    "seeds": "1",
    "master_seed": "0",
}

_KNOWN_KEYS = set(_DEFAULTS) | {
    "algorithm",
    "n",
    "k",
    "source_fraction",
    "side_length",
    "etas",
}


class ConfigError(Exception):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown config field '{key}'")
        values[key] = value.strip()
    return values


@dataclass
class ExperimentConfig:
    algorithms: list[str]
    sizes: list[tuple[int, int, float]]  # (n, k, side_length) triples
    etas: list[float]
    distribution: str
    c0: float
    delta: float
    c1: float
    c2: int
    c3: float
    payload_bytes: int
    trials: int
    seeds: int
    master_seed: int
    raw: dict[str, str] = field(default_factory=dict)

    def config_hash(self) -> str:
        canonical = "\n".join(f"{k}={v}" for k, v in sorted(self.raw.items()))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def cells(self) -> tuple[SweepCell, ...]:
        return tuple(
            SweepCell(
                algorithm=a,
                n=n,
                k=k,
                side_length=length,
                dist_kind=self.distribution,
                c0=self.c0,
                delta=self.delta,
                c1=self.c1,
                c2=self.c2,
                c3=self.c3,
                payload_bytes=self.payload_bytes,
            )
            for a in self.algorithms
            for (n, k, length) in self.sizes
        )


def _require(values: dict[str, str], key: str) -> str:
    if key not in values:
        raise ConfigError(f"missing required field '{key}'")
    return values[key]


def _parse_list(text: str, kind, key: str) -> list:
    try:
        return [kind(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"field '{key}': {exc}") from exc


def _broadcast(values: list, count: int, key: str) -> list:
    if len(values) == 1:
        return values * count
    if len(values) != count:
        raise ConfigError(f"field '{key}' has {len(values)} entries, expected 1 or {count}")
    return values


def build_config(values: dict[str, str], *, need_etas: bool, seed_override: int | None) -> ExperimentConfig:
    merged = dict(_DEFAULTS)
    merged.update(values)
    if seed_override is not None:
        merged["master_seed"] = str(seed_override)

    algorithms = _parse_list(_require(values, "algorithm"), str, "algorithm")
    for a in algorithms:
        if a not in (LTCDS1, LTCDS2):
            raise ConfigError(f"field 'algorithm': unknown algorithm '{a}'")
    ns = _parse_list(_require(values, "n"), int, "n")
    lengths = _broadcast(_parse_list(_require(values, "side_length"), float, "side_length"), len(ns), "side_length")
    if "k" in values:
        ks = _broadcast(_parse_list(values["k"], int, "k"), len(ns), "k")
    elif "source_fraction" in values:
        frac = float(values["source_fraction"])
        if not 0 < frac <= 1:
            raise ConfigError(f"field 'source_fraction': {frac} not in (0, 1]")
        ks = [max(1, round(frac * n)) for n in ns]
    else:
        raise ConfigError("missing required field 'k' (or 'source_fraction')")
    for n, k in zip(ns, ks):
        if k > n:
            raise ConfigError(f"field 'k': k={k} exceeds n={n}")
        if n < 2:
            raise ConfigError(f"field 'n': n={n} must be >= 2")
    for length in lengths:
        if length <= 1:
            raise ConfigError(f"field 'side_length': {length} must exceed 1")

    etas: list[float] = []
    if "etas" in values:
        etas = _parse_list(values["etas"], float, "etas")
    elif need_etas:
        raise ConfigError("missing required field 'etas'")

    distribution = merged["distribution"]
    if distribution not in (IDEAL, ROBUST):
        raise ConfigError(f"field 'distribution': unknown kind '{distribution}'")

    try:
        config = ExperimentConfig(
            algorithms=algorithms,
            sizes=list(zip(ns, ks, lengths)),
            etas=etas,
            distribution=distribution,
            c0=float(merged["c0"]),
            delta=float(merged["delta"]),
            c1=float(merged["c1"]),
            c2=int(merged["c2"]),
            c3=float(merged["c3"]),
            payload_bytes=int(merged["payload_bytes"]),
            trials=int(merged["trials"]),
            seeds=int(merged["seeds"]),
            master_seed=int(merged["master_seed"]),
            raw=merged,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if config.c1 <= 0 or config.c3 <= 0:
        raise ConfigError(f"fields 'c1'/'c3' must be positive, got c1={config.c1}, c3={config.c3}")
    if config.c2 < 2:
        raise ConfigError(f"field 'c2': {config.c2} must be >= 2")
    if config.payload_bytes < 1:
        raise ConfigError(f"field 'payload_bytes': {config.payload_bytes} must be >= 1")
    if config.trials < 1 or config.seeds < 1:
        raise ConfigError("fields 'trials' and 'seeds' must be >= 1")
    return config


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return f"{x:.10g}"
    return str(x)


def _provenance(config: ExperimentConfig) -> str:
    return f"# ltcds {__version__} config_hash={config.config_hash()} master_seed={config.master_seed}"


def _single_cell(config: ExperimentConfig) -> SweepCell:
    cells = config.cells()
    if len(cells) != 1:
        raise ConfigError("this command needs exactly one algorithm and one (n, k, side_length)")
    return cells[0]


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _run_summary_lines(config: ExperimentConfig, cell: SweepCell, snapshot: StorageSnapshot, degrees) -> list[str]:
    lines = [_provenance(config)]
    lines.append(
        "# run "
        + " ".join(
            f"{key}={_fmt(val)}"
            for key, val in [
                ("algorithm", snapshot.algorithm),
                ("n", snapshot.n),
                ("k", snapshot.k),
                ("L", snapshot.side_length),
                ("dist", cell.dist_kind),
                ("c1", cell.c1),
                ("c2", cell.c2),
                ("c3", cell.c3),
                ("transmissions", snapshot.transmissions),
                ("rounds", snapshot.rounds),
            ]
        )
    )
    lines.append("node_id,dn_u,code_degree,storage_degree,n_hat,k_hat")
    for v in range(snapshot.n):
        n_hat = _fmt(snapshot.n_hat[v]) if snapshot.n_hat is not None else ""
        k_hat = _fmt(snapshot.k_hat[v]) if snapshot.k_hat is not None else ""
        lines.append(
            f"{v},{degrees[v]},{snapshot.code_degrees[v]},{len(snapshot.packets[v].ids)},{n_hat},{k_hat}"
        )
    return lines


def cmd_run(config: ExperimentConfig, out: str, snapshot_out: str | None) -> int:
    cell = _single_cell(config)
    g, snapshot, _sources = run_cell(cell, config.master_seed, 0)
    _write_lines(out, _run_summary_lines(config, cell, snapshot, g.degrees))
    if snapshot_out:
        lines = [_provenance(config), "node_id,ids,payload"]
        for v, packet in enumerate(snapshot.packets):
            ids = ";".join(str(i) for i in packet.sorted_ids())
            lines.append(f"{v},{ids},{packet.payload.hex()}")
        _write_lines(snapshot_out, lines)
    return EXIT_OK


SWEEP_HEADER = "algorithm,n,k,L,dist,c1,c2,c3,eta,h,trials,successes,ps,ci95,seed_group"


def sweep_rows_to_csv(rows: list[SweepRow]) -> list[str]:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(x)
                for x in [
                    r.algorithm,
                    r.n,
                    r.k,
                    r.side_length,
                    r.dist,
                    r.c1,
                    r.c2,
                    r.c3,
                    r.eta,
                    r.h,
                    r.trials,
                    r.successes,
                    r.ps,
                    r.ci95,
                    r.seed_group,
                ]
            )
        )
    return lines


def cmd_sweep(config: ExperimentConfig, out: str, jobs: int) -> int:
    sweep_config = SweepConfig(
        cells=config.cells(),
        etas=tuple(config.etas),
        trials=config.trials,
        seeds=config.seeds,
        master_seed=config.master_seed,
    )
    rows = sweep(sweep_config, jobs=jobs)
    _write_lines(out, [_provenance(config)] + sweep_rows_to_csv(rows))
    return EXIT_OK


def cmd_estimate(config: ExperimentConfig, out: str) -> int:
    cell = _single_cell(config)
    if cell.algorithm != LTCDS2:
        raise ConfigError("field 'algorithm': estimate requires ltcds2")
    g, snapshot, _sources = run_cell(cell, config.master_seed, 0)
    lines = [_provenance(config), f"# truth n={snapshot.n} k={snapshot.k}", "node_id,dn_u,n_hat,k_hat"]
    for v in range(snapshot.n):
        lines.append(f"{v},{g.degrees[v]},{_fmt(snapshot.n_hat[v])},{snapshot.k_hat[v]}")
    _write_lines(out, lines)
    return EXIT_OK


def cmd_dump_dist(config: ExperimentConfig, out: str, induced: bool) -> int:
    cell = _single_cell(config)
    if cell.dist_kind == ROBUST:
        dist = robust_soliton(cell.k, cell.c0, cell.delta)
    else:
        dist = ideal_soliton(cell.k)
    lines = [_provenance(config), "degree,probability"]
    if induced:
        pmf = storage_degree_pmf(dist).pmf
        start = 0
    else:
        pmf = dist.pmf
        start = 1
    for d in range(start, len(pmf)):
        lines.append(f"{d},{pmf[d]:.12g}")
    _write_lines(out, lines)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ltcds", description="Distributed-storage simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "estimate", "dump-dist"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")
        if name == "run":
            p.add_argument("--snapshot", default=None, help="also dump per-node storage")
        if name == "dump-dist":
            p.add_argument("--induced", action="store_true", help="dump the storage-degree law")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            values = parse_config_text(fh.read())
        config = build_config(values, need_etas=args.command == "sweep", seed_override=args.seed)
        if args.command == "run":
            return cmd_run(config, args.out, args.snapshot)
        if args.command == "sweep":
            return cmd_sweep(config, args.out, args.jobs)
        if args.command == "estimate":
            return cmd_estimate(config, args.out)
        return cmd_dump_dist(config, args.out, args.induced)
    except (ConfigError, ParameterError) as exc:
        print(f"ltcds: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"ltcds: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        if "infeasible" in str(exc):
            print(f"ltcds: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"ltcds: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
