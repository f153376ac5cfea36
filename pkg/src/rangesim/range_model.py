"""Spatial model timestep: move, connect while in range, disconnect.

Every timestep a fresh random agent order is drawn; each agent moves to
a uniform choice among its legal tiles, then links to every agent within
range r and drops links to agents beyond r.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import Coordinate, RngStream, SimConfig, WorldState, candidate_moves, init_population
from .metrics import NetworkSnapshot

Observer = Callable[[int, NetworkSnapshot], None]


def range_links(positions: Sequence[Coordinate], r: float) -> np.ndarray:
    """Boolean link matrix: pair (i, j) linked iff their distance is <= r."""
    pos = np.asarray(positions, dtype=np.int64)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    linked = dist <= r
    np.fill_diagonal(linked, False)
    return linked


def step_range(world: WorldState, config: SimConfig, rng: RngStream) -> NetworkSnapshot:
    """Advance the world one timestep and return the resulting network.

    Movement is applied agent by agent in the drawn order, since occupancy
    makes move legality order-dependent. The per-agent connect/disconnect
    passes consume no randomness and always converge to the distance<=r
    graph on the final positions, so links are evaluated once at the end
    of the sweep; the draw sequence is identical to the interleaved form.
    """
    order = rng.permutation(world.n)
    positions = world.positions
    occupancy = world.occupancy
    for agent in order:
        agent = int(agent)
        moves = candidate_moves(world, agent)
        target = moves[int(rng.integers(len(moves)))]
        current = positions[agent]
        if target != current:
            del occupancy[current]
            occupancy[target] = agent
            positions[agent] = target
    world.link_matrix = range_links(positions, config.r)
    return NetworkSnapshot(world.link_matrix.copy())


def run_range(config: SimConfig, rng: RngStream,
              observers: Sequence[Observer] = (),
              collect: bool = True) -> list[NetworkSnapshot]:
    """Initialize a population and run `config.steps` timesteps.

    Observers are called after each step, in order, with (timestep,
    snapshot); timesteps count from 1. Snapshots are returned unless
    collect is False (long runs driven purely by observers). A run stops
    early only when every observer reports `done` (absorbing diffusion
    states); metric collectors never do.
    """
    world = init_population(config, rng)
    snapshots: list[NetworkSnapshot] = []
    for t in range(1, config.steps + 1):
        snap = step_range(world, config, rng)
        for obs in observers:
            obs(t, snap)
        if collect:
            snapshots.append(snap)
        if observers and all(getattr(obs, "done", False) for obs in observers):
            break
    return snapshots
