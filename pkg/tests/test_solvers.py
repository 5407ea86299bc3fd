import math
import sys
import unittest

import numpy as np

from prefgame.core.dynamics import occupancy_forward, occupancy_measure, policy_from_occupancy
from prefgame.core.errors import ConfigurationError, DomainError
from prefgame.data import Algorithm, GridworldSpec, OccupancyMeasure, Policy, SolverConfig
from prefgame.envs import cyclic_game, dom2, matrix_game, random_gridworld, rps, tie_game, token_chain
from prefgame.envs.preferences import dominant_preference
from prefgame.metrics import gap_bound
from prefgame.solvers import (
    OccupancyAverager, SolverState, averaged_policy, mirror_descent_objective, mpo_step, mwu_update, ompo_approx_step,
    ompo_exact_step, optimistic_reward, optimistic_rewards, regression_loss, regression_q,
    regression_targets, regression_update, run_solver, soft_bellman, stage_betas, two_player_ompo
)


def small_game(seed, max_states=5, max_actions=3, horizon=3):
    spec = GridworldSpec(
        seed=seed, state_range=(1, max_states), action_range=(2, max_actions), horizon=horizon,
        transition_sparsity=0.5
    )
    return random_gridworld(spec)


def chain_game(horizon, reward):
    # one state repeated for every stage
    return matrix_game(reward, horizon=horizon)


class TestOptimisticReward(unittest.TestCase):

    def test_equal_occupancies(self):
        game = dom2()
        d = occupancy_forward(game, Policy.uniform(game), 0)
        self.assertTrue(np.allclose(optimistic_reward(game, d, d, 0), [[0.65, 0.35]]))

    def test_tie_reward(self):
        game = tie_game(3)
        rng = np.random.default_rng(0)
        x = occupancy_forward(game, Policy.random(game, rng), 0)
        y = occupancy_forward(game, Policy.random(game, rng), 0)
        self.assertTrue(np.allclose(optimistic_reward(game, x, y, 0), 0.5))

    def test_dominant(self):
        game = dom2()
        d_t = np.array([[[1.0, 0.0]]])
        d_prev = np.array([[[0.0, 1.0]]])
        r = optimistic_reward(game, d_t, d_prev, 0)
        self.assertAlmostEqual(r[0, 0], 0.2)
        self.assertAlmostEqual(r[0, 1], -0.1)

    def test_stage_out_of_range(self):
        game = dom2()
        d = occupancy_measure(game, Policy.uniform(game))
        with self.assertRaises(DomainError):
            optimistic_reward(game, d, d, 1)

    def test_all_stages_match(self):
        game = small_game(1)
        rng = np.random.default_rng(1)
        x = occupancy_forward(game, Policy.random(game, rng), 0)
        y = occupancy_forward(game, Policy.random(game, rng), 0)
        stacked = optimistic_rewards(game, x, y)
        for h in range(game.horizon):
            self.assertTrue(np.allclose(stacked[h], optimistic_reward(game, x, y, h)))


class TestOMPO(unittest.TestCase):

    def test_stage_betas(self):
        self.assertTrue(np.allclose(stage_betas(1.0, 3), [1.0 / 3.0, 0.5, 1.0]))

    def test_dominant_step(self):
        game = dom2()
        new = ompo_exact_step(game, SolverState.initial(game), 0.5)
        self.assertAlmostEqual(new.probs[0, 0, 0], 0.53743, delta=1e-5)
        self.assertAlmostEqual(new.probs[0, 0, 1], 0.46257, delta=1e-5)

    def test_tie_game_unchanged(self):
        game = token_chain(3, 2, preference=None)
        game.reward[:] = 0.5
        rng = np.random.default_rng(2)
        state = SolverState.initial(game, Policy.random(game, rng))
        for step in (ompo_exact_step, ompo_approx_step):
            new = step(game, state, 0.7)
            self.assertTrue(np.allclose(new.probs, state.pi.probs, atol=1e-12))
        self.assertTrue(np.allclose(mpo_step(game, state.pi, 0.7).probs, state.pi.probs, atol=1e-12))

    def test_exact_equals_approx_at_horizon_one(self):
        rng = np.random.default_rng(3)
        for seed in range(5):
            game = small_game(seed, horizon=1)
            state = SolverState.initial(game, Policy.random(game, rng))
            state = state.advance(game, Policy.random(game, rng))
            exact = ompo_exact_step(game, state, 0.5)
            approx = ompo_approx_step(game, state, 0.5)
            self.assertTrue(np.allclose(exact.probs, approx.probs, atol=1e-12))

    def test_approx_close_to_exact(self):
        game = chain_game(2, dominant_preference())
        beta = 0.2
        state = SolverState.initial(game)
        for _ in range(5):
            exact = ompo_exact_step(game, state, beta)
            approx = ompo_approx_step(game, state, beta)
            gap = np.abs(exact.log_probs - approx.log_probs)
            betas = stage_betas(beta, game.horizon)
            q_max = game.horizon - np.arange(game.horizon)
            for h in range(game.horizon):
                self.assertLessEqual(gap[h].max(), betas[h] * q_max[h] ** 2)
            state = state.advance(game, exact)

    def test_player_symmetry(self):
        for seed in range(10):
            game = small_game(seed, horizon=1 + seed % 3)
            max_seq, min_seq = two_player_ompo(game, 1.0 / math.sqrt(2.0), 100)
            for a, b in zip(max_seq, min_seq):
                self.assertTrue(np.allclose(a.probs, b.probs, atol=1e-10, rtol=0), msg=f"seed {seed}")

    def test_mirror_descent_optimality(self):
        rng = np.random.default_rng(4)
        beta = 0.5
        for seed in range(10):
            game = small_game(seed, max_states=3, max_actions=2, horizon=2)
            state = SolverState.initial(game, Policy.random(game, rng))
            state = state.advance(game, Policy.random(game, rng))
            rewards = optimistic_rewards(game, state.d.d[0], state.d_prev.d[0])

            new = ompo_exact_step(game, state, beta)
            best = mirror_descent_objective(game, occupancy_forward(game, new, 0), state.pi, rewards, beta)
            for _ in range(1000):
                d = occupancy_forward(game, Policy.random(game, rng), 0)
                other = mirror_descent_objective(game, d, state.pi, rewards, beta)
                self.assertGreaterEqual(best, other - 1e-8, msg=f"seed {seed}")

    def test_soft_value_sandwich(self):
        beta = 1.0 / math.sqrt(2.0)
        for seed in range(20):
            game = small_game(seed, max_states=5, max_actions=3, horizon=1 + seed % 3)
            H = game.horizon
            betas = stage_betas(beta, H)
            state = SolverState.initial(game)
            for _ in range(200):
                rewards = optimistic_rewards(game, state.d.d[0], state.d_prev.d[0])
                Q, V = soft_bellman(game, state.pi, rewards, beta)
                for h in range(H):
                    visited = state.d.d[0][h].sum(axis=-1) > 0
                    mean = np.einsum("sa,sa->s", state.pi.probs[h], Q[h])[visited]
                    self.assertTrue(np.all(mean <= V[h][visited] + 1e-12), msg=f"seed {seed} stage {h}")
                    self.assertTrue(
                        np.all(V[h][visited] <= mean + betas[h] * (H - h) ** 2 + 1e-12), msg=f"seed {seed} stage {h}"
                    )
                state = state.advance(game, ompo_exact_step(game, state, beta))

    def test_policies_stay_positive(self):
        game = small_game(6)
        state = SolverState.initial(game)
        for _ in range(20):
            state = state.advance(game, ompo_exact_step(game, state, 1.0))
        self.assertTrue(np.all(state.pi.probs > 0))


class TestMPO(unittest.TestCase):

    def test_dominant_step(self):
        game = dom2()
        new = mpo_step(game, Policy.uniform(game), 1.0)
        self.assertAlmostEqual(new.probs[0, 0, 0], 0.57444, delta=1e-5)
        self.assertAlmostEqual(new.probs[0, 0, 1], 0.42556, delta=1e-5)

    def test_rps_uniform_is_fixed(self):
        game = rps()
        new = mpo_step(game, Policy.uniform(game), 1.0)
        self.assertTrue(np.allclose(new.probs, 1.0 / 3.0))

    def test_default_beta(self):
        game = dom2(horizon=2)
        config = SolverConfig(algorithm=Algorithm.MPO, iterations=100)
        self.assertAlmostEqual(config.resolve_beta(game), math.sqrt(math.log(2) / (100 * 4)))
        config = SolverConfig(algorithm=Algorithm.OMPO_EXACT)
        self.assertAlmostEqual(config.resolve_beta(game), 1.0 / math.sqrt(2.0))


class TestAveraging(unittest.TestCase):

    def test_single_element(self):
        game = small_game(2)
        d = occupancy_measure(game, Policy.random(game, np.random.default_rng(0)))
        self.assertTrue(np.allclose(averaged_policy([d]).probs, policy_from_occupancy(d).probs))

    def test_pure_chain_policies(self):
        game = token_chain(3, 2)
        first = occupancy_measure(game, Policy.pure(game, 0))
        second = occupancy_measure(game, Policy.pure(game, 1))
        mixed = occupancy_measure(game, averaged_policy([first, second]))
        self.assertTrue(np.allclose(mixed.d, (first.d + second.d) / 2.0, atol=1e-10))

    def test_identical_history(self):
        game = small_game(3)
        policy = Policy.random(game, np.random.default_rng(1))
        d = occupancy_measure(game, policy)
        reached = d.state_marginal()[0] > 0
        averaged = averaged_policy([d, d, d])
        self.assertTrue(np.allclose(averaged.probs[reached], policy.probs[reached]))

    def test_random_histories(self):
        rng = np.random.default_rng(2)
        for i in range(50):
            game = small_game(i % 10)
            history = [occupancy_measure(game, Policy.random(game, rng)) for _ in range(1 + i % 7)]
            mean = np.mean([d.d for d in history], axis=0)
            realized = occupancy_measure(game, averaged_policy(history))
            self.assertTrue(np.allclose(realized.d, mean, atol=1e-10, rtol=0))

    def test_empty_history(self):
        with self.assertRaises(DomainError):
            averaged_policy([])
        with self.assertRaises(DomainError):
            OccupancyAverager().mean()

    def test_mismatched_history(self):
        averager = OccupancyAverager()
        averager.add(OccupancyMeasure([0], np.full((1, 1, 1, 2), 0.5)))
        with self.assertRaises(DomainError):
            averager.add(OccupancyMeasure([0], np.full((1, 2, 1, 2), 0.5)))


class TestRegression(unittest.TestCase):

    def test_tie_fixed_point(self):
        game = tie_game(3, horizon=2)
        state = SolverState.initial(game, Policy.random(game, np.random.default_rng(0)))
        q_hat = regression_q(game, state, 0.5, optimistic=True)
        loss, _ = regression_loss(state.pi.log_probs, regression_targets(game, state.pi, q_hat, 0.5))
        self.assertAlmostEqual(loss, 0.0, places=12)

        new = regression_update(game, state, 0.5, q_hat)
        self.assertLess(new.total_variation(state.pi), 1e-6)

    def test_zero_steps(self):
        game = dom2()
        state = SolverState.initial(game)
        q_hat = regression_q(game, state, 0.5, optimistic=True)
        new = regression_update(game, state, 0.5, q_hat, steps=0)
        self.assertTrue(np.allclose(new.probs, state.pi.probs))

    def test_matches_closed_form(self):
        games = [dom2(), cyclic_game(3), cyclic_game(4, p=0.9)] + [small_game(seed, horizon=1) for seed in range(5)]
        beta = 0.5
        for game in games:
            state = SolverState.initial(game)
            state = state.advance(game, ompo_exact_step(game, state, beta))

            closed = ompo_exact_step(game, state, beta)
            fitted = regression_update(game, state, beta, regression_q(game, state, beta, optimistic=True))
            self.assertLess(fitted.total_variation(closed), 1e-4, msg=game.summary())

            closed = mpo_step(game, state.pi, beta)
            fitted = regression_update(game, state, beta, regression_q(game, state, beta, optimistic=False))
            self.assertLess(fitted.total_variation(closed), 1e-4, msg=game.summary())

    def test_flat_rate_over_stages(self):
        beta = 0.5
        for seed in range(3):
            game = small_game(seed, horizon=3)
            state = SolverState.initial(game)
            state = state.advance(game, ompo_exact_step(game, state, beta))

            q_hat = regression_q(game, state, beta, optimistic=True)
            fitted = regression_update(game, state, beta, q_hat, steps=400)
            flat = mwu_update(state.pi, q_hat, np.full(game.horizon, beta))
            self.assertLess(fitted.total_variation(flat), 1e-4, msg=game.summary())

    def test_monte_carlo_targets_on_ties(self):
        game = tie_game(2, horizon=2)
        state = SolverState.initial(game)
        q_hat = regression_q(game, state, 0.5, optimistic=True, mc_samples=10, rng=np.random.default_rng(0))
        self.assertTrue(np.allclose(q_hat[0], 1.0))
        self.assertTrue(np.allclose(q_hat[1], 0.5))


class TestRunSolver(unittest.TestCase):

    def test_record_schedule(self):
        game = dom2()
        trace = run_solver(game, SolverConfig(iterations=10, eval_every=3))
        self.assertEqual([r.iteration for r in trace.records], [3, 6, 9, 10])
        for r in trace.records:
            self.assertAlmostEqual(r.self_play_value, 0.5, delta=1e-8)
            self.assertEqual(r.elapsed_ms, 0.0)

    def test_zero_iterations(self):
        game = dom2()
        trace = run_solver(game, SolverConfig(iterations=0))
        self.assertEqual(len(trace), 0)
        self.assertTrue(np.allclose(trace.last_policy.probs, 0.5))

    def test_rps_last_iterate(self):
        game = rps()
        trace = run_solver(game, SolverConfig(algorithm=Algorithm.OMPO_EXACT, beta=0.5, iterations=200, eval_every=50))
        self.assertLessEqual(trace.final_record.last_exploitability, 1e-3)

        trace = run_solver(game, SolverConfig(algorithm=Algorithm.MPO, iterations=200, eval_every=50))
        self.assertLessEqual(trace.final_record.averaged_exploitability, 2e-2)

    def test_every_algorithm_runs(self):
        game = small_game(4, horizon=2)
        for algorithm in Algorithm.ALL:
            trace = run_solver(game, SolverConfig(algorithm=algorithm, iterations=4, eval_every=2, inner_steps=20))
            self.assertEqual(len(trace), 2, msg=algorithm)
            for r in trace.records:
                self.assertGreaterEqual(r.last_exploitability, 0.0)
                self.assertGreaterEqual(r.averaged_exploitability, 0.0)

    def test_deterministic(self):
        game = small_game(5)
        config = SolverConfig(algorithm=Algorithm.OMPO_REGRESSION, iterations=3, mc_samples=4, inner_steps=10, seed=9)
        first, second = run_solver(game, config), run_solver(game, config)
        self.assertEqual(first.records, second.records)

    def test_invalid_game(self):
        game = dom2()
        game.reward[0, 0, 0, 1] = 0.9
        with self.assertRaises(DomainError):
            run_solver(game, SolverConfig(iterations=1))

    def test_bad_config(self):
        with self.assertRaises(ConfigurationError) as ctx:
            SolverConfig(beta=-1.0)
        self.assertEqual(ctx.exception.key, "solver.beta")
        with self.assertRaises(ConfigurationError):
            SolverConfig(algorithm="sgd")

    def test_gap_bound(self):
        beta = 1.0 / math.sqrt(2.0)
        for seed in range(20):
            game = small_game(seed, max_states=5, max_actions=3, horizon=1 + seed % 3)
            trace = run_solver(game, SolverConfig(algorithm=Algorithm.OMPO_EXACT, iterations=800, eval_every=50))
            for T in (50, 200, 800):
                self.assertLessEqual(trace.record_at(T).nash_gap, gap_bound(game, beta, T) + 1e-6, msg=f"seed {seed}")

    def test_dominant_action_wins(self):
        trace = run_solver(dom2(), SolverConfig(iterations=500, eval_every=500))
        self.assertGreaterEqual(trace.averaged_policy.probs[0, 0, 0], 0.99)
        self.assertGreaterEqual(trace.last_policy.probs[0, 0, 0], 0.99)


if __name__ == "__main__":
    unittest.main(argv=sys.argv)
