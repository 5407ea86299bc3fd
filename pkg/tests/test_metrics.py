import math
import sys
import unittest

import numpy as np

from prefgame.core.dynamics import game_value
from prefgame.data import GridworldSpec, Policy
from prefgame.envs import dom2, random_gridworld, rps, tie_game, token_chain
from prefgame.metrics import (
    best_response, exploitability, gap_bound, min_response, nash_gap, theoretical_iterations,
    uniform_occupancy_floor
)


def small_game(seed, horizon=3):
    spec = GridworldSpec(seed=seed, state_range=(1, 5), action_range=(2, 3), horizon=horizon, transition_sparsity=0.5)
    return random_gridworld(spec)


class TestBestResponse(unittest.TestCase):

    def test_dominant(self):
        game = dom2()
        br = best_response(game, Policy.uniform(game))
        self.assertAlmostEqual(br.value, 0.65)
        self.assertEqual(br.policy.probs[0, 0, 0], 1.0)

    def test_symmetric_opponent(self):
        game = rps()
        self.assertAlmostEqual(best_response(game, Policy.uniform(game)).value, 0.5)

    def test_ties_go_to_lowest_action(self):
        game = tie_game(3)
        br = best_response(game, Policy.uniform(game))
        self.assertAlmostEqual(br.value, 0.5)
        self.assertEqual(list(br.policy.probs[0, 0]), [1.0, 0.0, 0.0])

    def test_value_matches_pairwise(self):
        rng = np.random.default_rng(0)
        for seed in range(10):
            game = small_game(seed)
            opponent = Policy.random(game, rng)
            br = best_response(game, opponent)
            self.assertAlmostEqual(br.value, game_value(game, br.policy, opponent), delta=1e-10)
            self.assertGreaterEqual(br.value, game.horizon / 2.0 - 1e-10)
            # no pure policy does better
            for _ in range(20):
                other = Policy.pure(game, rng.integers(0, game.num_actions, size=(game.horizon, game.num_states)))
                self.assertLessEqual(game_value(game, other, opponent), br.value + 1e-10)

    def test_min_response(self):
        game = dom2()
        worst = min_response(game, Policy.uniform(game))
        self.assertAlmostEqual(worst.value, 0.35)
        self.assertEqual(worst.policy.probs[0, 0, 0], 1.0)

    def test_unvisited_states_do_not_matter(self):
        game = token_chain(3, 2)
        opponent = Policy.pure(game, 0)
        changed = opponent.probs.copy()
        # prefixes containing token 1 are never visited by the opponent
        changed[1:, [2, 4, 5, 6]] = [0.3, 0.7]
        value = best_response(game, opponent).value
        self.assertAlmostEqual(best_response(game, Policy(changed)).value, value, delta=1e-12)


class TestExploitability(unittest.TestCase):

    def test_rps_uniform(self):
        game = rps()
        self.assertEqual(exploitability(game, Policy.uniform(game)), 0.0)

    def test_dominant(self):
        game = dom2()
        self.assertAlmostEqual(exploitability(game, Policy.uniform(game)), 0.15)
        self.assertAlmostEqual(exploitability(game, Policy.pure(game, 1)), 0.3)
        self.assertEqual(exploitability(game, Policy.pure(game, 0)), 0.0)

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        for seed in range(10):
            game = small_game(seed)
            self.assertGreaterEqual(exploitability(game, Policy.random(game, rng)), 0.0)


class TestNashGap(unittest.TestCase):

    def test_equilibrium(self):
        game = rps(horizon=2)
        gap = nash_gap(game, Policy.uniform(game))
        self.assertAlmostEqual(gap[0], 0.0, delta=1e-12)
        self.assertAlmostEqual(gap[1], 0.0, delta=1e-12)

    def test_dominant(self):
        game = dom2()
        max_side, min_side = nash_gap(game, Policy.uniform(game))
        self.assertIs(type(max_side), float)
        self.assertIs(type(min_side), float)
        self.assertAlmostEqual(max_side, 0.15)
        self.assertAlmostEqual(min_side, 0.15)

    def test_sides_agree(self):
        rng = np.random.default_rng(2)
        for i in range(100):
            game = small_game(i % 20, horizon=1 + i % 3)
            policy = Policy.random(game, rng)
            max_side, min_side = nash_gap(game, policy)
            self.assertAlmostEqual(max_side, min_side, delta=1e-10)
            self.assertAlmostEqual(max_side, exploitability(game, policy), delta=1e-10)


class TestBounds(unittest.TestCase):

    def test_occupancy_floor(self):
        self.assertEqual(uniform_occupancy_floor(dom2()), 0.5)
        self.assertAlmostEqual(uniform_occupancy_floor(token_chain(3, 2)), 0.125)

    def test_theoretical_iterations(self):
        game = dom2()
        beta = 1.0 / math.sqrt(2.0)
        expected = 10.0 * math.log(2.0) / (beta * 0.01)
        self.assertEqual(theoretical_iterations(game, beta, 0.01), math.ceil(expected))
        self.assertAlmostEqual(gap_bound(game, beta, 100), expected / 100 * 0.01)


if __name__ == "__main__":
    unittest.main(argv=sys.argv)
