"""Random geometric graph substrate.

Nodes are placed uniformly at random in the square [0, L]^2 and two nodes
are linked whenever their Euclidean distance is at most the communication
radius, which is fixed at 1 (so L is measured in communication radii).
There is no wraparound; boundary nodes simply see fewer neighbors.

A constructed ``Graph`` is immutable and safe to share across concurrent
simulation runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError, SimulationError
from .seeding import spawn_rng

COMM_RADIUS = 1.0


@dataclass(frozen=True)
class Graph:
    """Undirected unit-disk graph over points in [0, L]^2."""

    n: int
    side_length: float
    positions: np.ndarray          # shape (n, 2)
    adjacency: tuple[tuple[int, ...], ...]
    radius: float = COMM_RADIUS

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2


@dataclass(frozen=True)
class GraphStats:
    density: float
    mean_degree: float
    connected: bool


def graph_from_positions(positions: np.ndarray, side_length: float) -> Graph:
    """Build the adjacency structure for explicit node positions."""
    pts = np.asarray(positions, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError(f"positions must have shape (n, 2), got {pts.shape}")
    n = pts.shape[0]
    neighbors: list[list[int]] = [[] for _ in range(n)]
    if n > 1:
        tree = cKDTree(pts)
        for u, v in tree.query_pairs(COMM_RADIUS):
            neighbors[u].append(v)
            neighbors[v].append(u)
    adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbors)
    pts.setflags(write=False)
    return Graph(n=n, side_length=float(side_length), positions=pts, adjacency=adjacency)


def generate_rgg(n: int, side_length: float, rng: np.random.Generator) -> Graph:
    """Place n nodes uniformly in [0, L]^2 and link pairs within distance 1."""
    if n < 2:
        raise ParameterError(f"need at least 2 nodes, got n={n}")
    if side_length <= 1:
        raise ParameterError(f"side_length must exceed 1, got {side_length}")
    positions = rng.uniform(0.0, side_length, size=(n, 2))
    return graph_from_positions(positions, side_length)


def is_connected(g: Graph) -> bool:
    """True iff a traversal from node 0 reaches all n nodes."""
    seen = bytearray(g.n)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v in g.adjacency[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                stack.append(v)
    return count == g.n


def graph_stats(g: Graph) -> GraphStats:
    degs = g.degrees
    return GraphStats(
        density=g.n / g.side_length**2,
        mean_degree=float(degs.mean()),
        connected=is_connected(g),
    )


def connected_rgg(
    n: int,
    side_length: float,
    master_seed: int,
    *,
    label: str = "graph",
    max_attempts: int = 100,
) -> Graph:
    """Regenerate with fresh sub-seeds until the graph is connected.

    All random-walk dissemination guarantees assume connectivity, so
    experiment drivers use this instead of a bare generate_rgg.
    """
    for attempt in range(max_attempts):
        g = generate_rgg(n, side_length, spawn_rng(master_seed, label, attempt))
        if is_connected(g):
            return g
    raise SimulationError(
        f"no connected graph with n={n}, L={side_length} in {max_attempts} attempts; "
        "the configuration is too sparse"
    )


def select_sources(g: Graph, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Pick k distinct source nodes uniformly at random, without replacement."""
    if not 1 <= k <= g.n:
        raise ParameterError(f"source count k={k} must be in 1..n={g.n}")
    chosen = rng.choice(g.n, size=k, replace=False)
    return tuple(sorted(int(u) for u in chosen))


def dump_graph(g: Graph, path) -> None:
    """Write the debug/plot dump: "n L", then "id x y" rows, then "u v" edges."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.side_length:.10g}\n")
        for u in range(g.n):
            x, y = g.positions[u]
            fh.write(f"{u} {x:.10g} {y:.10g}\n")
        for u in range(g.n):
            for v in g.adjacency[u]:
                if u < v:
                    fh.write(f"{u} {v}\n")
