"""Per-timestep network measures on immutable graph snapshots.

Six measures per snapshot: average degree, average clustering, average
shortest path length, number of connected components, size of the
largest component, and the small-world index against sampled same-size
random graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import shortest_path as _shortest_path

from .core import RngStream

DEFAULT_N_REF = 20


@dataclass(frozen=True)
class NetworkSnapshot:
    """Simple undirected graph for one timestep.

    Wraps a symmetric boolean adjacency matrix with a False diagonal.
    Instances are read-only; edge and neighbor views are derived lazily.
    """

    adj: np.ndarray

    def __post_init__(self) -> None:
        adj = self.adj
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.dtype != np.bool_:
            raise ValueError("adjacency must be a square boolean matrix")
        adj.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "NetworkSnapshot":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-link on node {i}")
            adj[i, j] = adj[j, i] = True
        return cls(adj)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adj, k=1))
        return frozenset((int(i), int(j)) for i, j in zip(iu, ju))

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def neighbors(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.adj[node])


@dataclass(frozen=True)
class MetricsRow:
    """The six per-timestep measures; small_world is None when undefined."""

    avg_degree: float
    clustering: float
    aspl: float
    n_components: int
    largest_component: int
    small_world: float | None
    timestep: int

METRIC_NAMES = ("avg_degree", "clustering", "aspl", "n_components",
                "largest_component", "small_world")


def average_degree(snap: NetworkSnapshot) -> float:
    """Population mean of node degrees, 2m/n."""
    return 2.0 * snap.edge_count / snap.n


def average_clustering(snap: NetworkSnapshot) -> float:
    """Mean local clustering coefficient.

    Per node: linked neighbor pairs over possible neighbor pairs; nodes
    with fewer than two neighbors contribute 0.
    """
    a = snap.adj.astype(np.float64)
    k = a.sum(axis=1)
    # ((A@A) * A) row-sums count each edge among a node's neighbors twice
    closed = ((a @ a) * a).sum(axis=1)
    possible = k * (k - 1.0)
    local = np.divide(closed, possible, out=np.zeros_like(closed),
                      where=possible > 0)
    return float(local.mean())


def transitivity(snap: NetworkSnapshot) -> float:
    """Global transitivity (closed triads over all triads). Debug-only output."""
    a = snap.adj.astype(np.float64)
    closed = ((a @ a) * a).sum()
    k = a.sum(axis=1)
    triads = (k * (k - 1.0)).sum()
    return float(closed / triads) if triads > 0 else 0.0


def _distance_matrix(snap: NetworkSnapshot) -> np.ndarray:
    return _shortest_path(snap.adj.astype(np.float64), method="FW", directed=False)


def average_shortest_path_length(snap: NetworkSnapshot) -> float:
    """Mean shortest path length over connected node pairs; 0 if none are."""
    if snap.n < 2 or snap.edge_count == 0:
        return 0.0
    dist = _distance_matrix(snap)
    iu, ju = np.triu_indices(snap.n, k=1)
    pair_dists = dist[iu, ju]
    finite = pair_dists[np.isfinite(pair_dists)]
    if finite.size == 0:
        return 0.0
    return float(finite.mean())


def components(snap: NetworkSnapshot) -> tuple[int, int]:
    """(number of connected components, size of the largest one)."""
    count, labels = _cc(csr_array(snap.adj), directed=False)
    largest = int(np.bincount(labels).max())
    return int(count), largest


_PAIR_INDEX_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _PAIR_INDEX_CACHE.get(n)
    if cached is None:
        cached = np.triu_indices(n, k=1)
        _PAIR_INDEX_CACHE[n] = cached
    return cached


def sample_gnm(n: int, m: int, rng: RngStream) -> NetworkSnapshot:
    """One uniform sample from the simple graphs with n nodes and m edges."""
    iu, ju = _pair_indices(n)
    n_pairs = iu.size
    if m > n_pairs:
        raise ValueError(f"cannot place {m} edges on {n} nodes")
    adj = np.zeros((n, n), dtype=bool)
    if m > 0:
        chosen = rng.choice(n_pairs, size=m, replace=False)
        adj[iu[chosen], ju[chosen]] = True
        adj |= adj.T
    return NetworkSnapshot(adj)


def small_world_index(snap: NetworkSnapshot, rng: RngStream,
                      n_ref: int = DEFAULT_N_REF) -> float | None:
    """Clustering and path-length ratios against same-size random graphs.

    The reference clustering C_R and path length L_R are means over n_ref
    graphs sampled uniformly with the snapshot's node and edge counts.
    Returns (C_G/C_R) / (L_G/L_R), or None whenever a ratio is undefined
    (C_R = 0, L_R = 0, or L_G = 0).
    """
    if n_ref < 1:
        raise ValueError(f"need at least one reference graph, got n_ref={n_ref}")
    c_g = average_clustering(snap)
    l_g = average_shortest_path_length(snap)
    c_total = 0.0
    l_total = 0.0
    for _ in range(n_ref):
        ref = sample_gnm(snap.n, snap.edge_count, rng)
        c_total += average_clustering(ref)
        l_total += average_shortest_path_length(ref)
    c_r = c_total / n_ref
    l_r = l_total / n_ref
    if c_r == 0.0 or l_r == 0.0 or l_g == 0.0:
        return None
    return (c_g / c_r) / (l_g / l_r)


def metrics_snapshot(snap: NetworkSnapshot, rng: RngStream, timestep: int = 0,
                     n_ref: int = DEFAULT_N_REF,
                     small_world: bool = True) -> MetricsRow:
    """All six measures for one snapshot.

    Small-world reference sampling is the only randomized part and
    consumes the generator deterministically; pass small_world=False to
    skip it (the column is then None).

    Path lengths and components share one distance-matrix computation;
    the results are identical to calling the individual operations.
    """
    n = snap.n
    if n < 2 or snap.edge_count == 0:
        aspl = 0.0
        count, largest = n, 1
    else:
        dist = _distance_matrix(snap)
        iu, ju = _pair_indices(n)
        pair_dists = dist[iu, ju]
        finite = pair_dists[np.isfinite(pair_dists)]
        aspl = float(finite.mean()) if finite.size else 0.0
        # the lowest-indexed reachable node labels each component
        reps = np.isfinite(dist).argmax(axis=1)
        uniq, sizes = np.unique(reps, return_counts=True)
        count, largest = int(uniq.size), int(sizes.max())
    sw = small_world_index(snap, rng, n_ref=n_ref) if small_world else None
    return MetricsRow(
        avg_degree=average_degree(snap),
        clustering=average_clustering(snap),
        aspl=aspl,
        n_components=count,
        largest_component=largest,
        small_world=sw,
        timestep=timestep,
    )
