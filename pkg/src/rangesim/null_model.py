"""Dynamic non-spatial baseline.

Every timestep each unconnected pair links with probability P(connect)
and each connected pair unlinks with probability 1 - P(connect). There
are no positions; only the link set evolves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ConfigError, RngStream, SimConfig
from .metrics import NetworkSnapshot, _pair_indices
from .range_model import Observer


@dataclass
class NullState:
    """Link indicators over the n*(n-1)/2 unordered pairs, row-major i < j."""

    n: int
    link_vector: np.ndarray

    @classmethod
    def initial(cls, n: int) -> "NullState":
        return cls(n=n, link_vector=np.zeros(n * (n - 1) // 2, dtype=bool))

    @property
    def links(self) -> set[tuple[int, int]]:
        iu, ju = _pair_indices(self.n)
        on = np.flatnonzero(self.link_vector)
        return {(int(iu[k]), int(ju[k])) for k in on}

    def snapshot(self) -> NetworkSnapshot:
        iu, ju = _pair_indices(self.n)
        adj = np.zeros((self.n, self.n), dtype=bool)
        adj[iu[self.link_vector], ju[self.link_vector]] = True
        adj |= adj.T
        return NetworkSnapshot(adj)


def step_null(state: NullState, p_connect: float, rng: RngStream) -> NetworkSnapshot:
    """Visit every pair once, in pair order, and retoggle its link.

    Unlinked pairs link with probability p_connect; linked pairs unlink
    with probability 1 - p_connect. One uniform draw per pair per step.
    """
    if not 0.0 <= p_connect <= 1.0:
        raise ConfigError(f"p_connect must be in [0, 1], got {p_connect}")
    u = rng.random(state.link_vector.size)
    on = state.link_vector
    # linked pairs survive when u >= 1-p (prob p); unlinked pairs form when u < p
    state.link_vector = np.where(on, u >= 1.0 - p_connect, u < p_connect)
    return state.snapshot()


def run_null(config: SimConfig, rng: RngStream,
             observers: Sequence[Observer] = (),
             collect: bool = True) -> list[NetworkSnapshot]:
    """Run `config.steps` null-model timesteps from an empty link set.

    Observer and early-stop semantics match `run_range`.
    """
    state = NullState.initial(config.n)
    snapshots: list[NetworkSnapshot] = []
    for t in range(1, config.steps + 1):
        snap = step_null(state, config.p_connect, rng)
        for obs in observers:
            obs(t, snap)
        if collect:
            snapshots.append(snap)
        if observers and all(getattr(obs, "done", False) for obs in observers):
            break
    return snapshots
