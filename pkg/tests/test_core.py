import math

import numpy as np
import pytest

from rangesim.core import (
    ConfigError,
    Coordinate,
    ModelKind,
    SimConfig,
    WorldState,
    candidate_moves,
    euclidean_distance,
    init_population,
    make_rng,
)


def range_config(**kwargs):
    defaults = dict(model=ModelKind.RANGE, n=10, g=10, r=2.0, steps=10, rounds=1, seed=1)
    defaults.update(kwargs)
    return SimConfig(**defaults)


def world_with(positions, g=10):
    coords = [Coordinate(*p) for p in positions]
    n = len(coords)
    return WorldState(g=g, positions=coords,
                      occupancy={c: i for i, c in enumerate(coords)},
                      link_matrix=np.zeros((n, n), dtype=bool))


class TestSimConfig:
    def test_range_requires_unique_positions(self):
        with pytest.raises(ConfigError):
            range_config(n=50, g=7)

    def test_range_requires_r(self):
        with pytest.raises(ConfigError):
            range_config(r=None)

    def test_negative_r_rejected(self):
        with pytest.raises(ConfigError):
            range_config(r=-0.5)

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_p_connect_bounds(self, p):
        with pytest.raises(ConfigError):
            SimConfig(model=ModelKind.NULL, n=5, p_connect=p)

    def test_null_allows_n_above_tiles(self):
        SimConfig(model=ModelKind.NULL, n=200, g=7, p_connect=0.5)

    def test_saturated_grid_allowed(self):
        range_config(n=49, g=7)


class TestInitPopulation:
    def test_saturated_grid_occupies_every_tile(self):
        # N = g*g = 49: every tile taken exactly once
        cfg = range_config(n=49, g=7)
        world = init_population(cfg, make_rng(cfg.seed, 0))
        assert len(set(world.positions)) == 49
        assert set(world.positions) == {Coordinate(x, y) for x in range(7) for y in range(7)}

    def test_single_agent_no_links(self):
        cfg = range_config(n=1, g=4)
        world = init_population(cfg, make_rng(cfg.seed, 0))
        assert len(world.positions) == 1
        assert world.links == set()

    def test_same_seed_same_positions(self):
        cfg = range_config(n=10, g=10, seed=77)
        w1 = init_population(cfg, make_rng(cfg.seed, 3))
        w2 = init_population(cfg, make_rng(cfg.seed, 3))
        assert w1.positions == w2.positions

    def test_occupancy_is_bijection(self):
        cfg = range_config(n=30, g=8)
        world = init_population(cfg, make_rng(cfg.seed, 0))
        assert len(world.occupancy) == 30
        for pos, agent in world.occupancy.items():
            assert world.positions[agent] == pos

    def test_positions_in_bounds(self):
        cfg = range_config(n=40, g=7)
        world = init_population(cfg, make_rng(cfg.seed, 0))
        for x, y in world.positions:
            assert 0 <= x < 7 and 0 <= y < 7

    def test_null_model_has_no_positions(self):
        cfg = SimConfig(model=ModelKind.NULL, n=6, p_connect=0.5)
        world = init_population(cfg, make_rng(cfg.seed, 0))
        assert world.positions == []
        assert world.links == set()
        assert world.n == 6


class TestEuclideanDistance:
    def test_three_four_five(self):
        assert euclidean_distance(Coordinate(0, 0), Coordinate(3, 4)) == 5.0

    def test_identity(self):
        assert euclidean_distance(Coordinate(2, 2), Coordinate(2, 2)) == 0.0

    def test_unit_diagonal(self):
        assert euclidean_distance(Coordinate(0, 0), Coordinate(1, 1)) == math.sqrt(2)

    def test_random_triples(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            a, b, c = (Coordinate(int(p[0]), int(p[1]))
                       for p in rng.integers(0, 50, size=(3, 2)))
            ab = euclidean_distance(a, b)
            assert ab == euclidean_distance(b, a)
            assert ab >= 0
            assert (ab == 0) == (a == b)
            assert ab <= euclidean_distance(a, c) + euclidean_distance(c, b) + 1e-12


class TestCandidateMoves:
    def test_corner_on_empty_grid(self):
        world = world_with([(0, 0)], g=4)
        moves = candidate_moves(world, 0)
        assert set(moves) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_interior_full_neighborhood(self):
        world = world_with([(2, 2)], g=5)
        assert len(candidate_moves(world, 0)) == 9

    def test_fully_surrounded_agent_stays(self):
        center = (2, 2)
        ring = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2), (3, 3)]
        world = world_with([center] + ring, g=5)
        assert candidate_moves(world, 0) == [Coordinate(2, 2)]

    def test_current_tile_always_included(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            g = int(rng.integers(2, 8))
            n = int(rng.integers(1, g * g + 1))
            cfg = range_config(n=n, g=g, r=1.0)
            world = init_population(cfg, np.random.default_rng(int(rng.integers(1 << 30))))
            agent = int(rng.integers(n))
            moves = candidate_moves(world, agent)
            current = world.positions[agent]
            assert current in moves
            for mv in moves:
                assert 0 <= mv.x < g and 0 <= mv.y < g
                assert max(abs(mv.x - current.x), abs(mv.y - current.y)) <= 1
                holder = world.occupancy.get(mv)
                assert holder is None or holder == agent

    def test_order_is_row_major(self):
        world = world_with([(1, 1)], g=4)
        moves = candidate_moves(world, 0)
        assert moves == sorted(moves)


class TestRngStreams:
    def test_same_key_same_stream(self):
        a = make_rng(9, 4, 1)
        b = make_rng(9, 4, 1)
        assert np.array_equal(a.random(8), b.random(8))

    def test_distinct_rounds_distinct_streams(self):
        a = make_rng(9, 0)
        b = make_rng(9, 1)
        assert not np.array_equal(a.random(8), b.random(8))
