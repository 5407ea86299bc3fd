import os
import sys
import unittest

import numpy as np

from prefgame.cli import load_experiment, preset_path
from prefgame.data import Algorithm, SolverConfig
from prefgame.envs import build_environment, rps, weighted_rps, weighted_rps_equilibrium
from prefgame.solvers import run_solver

SLOW = os.environ.get("PREFGAME_SLOW_TESTS", "") == "1"

ITERATIONS = 2000
BURN_IN = 200


def settles_below(trace, threshold=1e-3, ceiling=2e-3):
    """
    True when the last-iterate exploitability reaches threshold and stays under ceiling for
    every later record.
    """
    values = [r.last_exploitability for r in trace.records]
    hits = [i for i, v in enumerate(values) if v <= threshold]
    if not hits:
        return False
    return max(values[hits[0]:]) <= ceiling


def full_support_games(count=10):
    # every win probability above 1/2 keeps the equilibrium in the interior of the simplex
    for seed in range(count):
        wins = np.random.default_rng(seed).uniform(0.9, 1.0, size=3)
        yield seed, wins, weighted_rps(wins)


def last_iterate_run(game):
    return run_solver(game, SolverConfig(algorithm=Algorithm.OMPO_EXACT, iterations=ITERATIONS, eval_every=5))


class TestLastIterate(unittest.TestCase):

    def test_rps(self):
        self.assertTrue(settles_below(last_iterate_run(rps())))

    def test_full_support_games(self):
        for seed, wins, game in full_support_games():
            trace = last_iterate_run(game)
            self.assertTrue(settles_below(trace), msg=f"seed {seed}")
            self.assertTrue(
                np.allclose(trace.last_policy.probs[0, 0], weighted_rps_equilibrium(wins), atol=1e-3), msg=f"seed {seed}"
            )

    def test_trend_after_burn_in(self):
        checkpoints = list(range(BURN_IN, ITERATIONS + 1, BURN_IN))
        curves = []
        for _, _, game in full_support_games():
            trace = last_iterate_run(game)
            curves.append([trace.record_at(t).last_exploitability for t in checkpoints])

        median = np.median(np.array(curves), axis=0)
        for before, after in zip(median, median[1:]):
            self.assertLessEqual(after, before + 1e-12)


@unittest.skipUnless(SLOW, "set PREFGAME_SLOW_TESTS=1")
class TestGridworldStudy(unittest.TestCase):

    def test_ompo_ahead_of_mpo(self):
        config = load_experiment(preset_path("fig3a"))
        curves = {}
        for solver in config.solvers:
            runs = []
            for seed in range(config.base_seed, config.base_seed + config.seeds):
                trace = run_solver(build_environment(config.environment, seed), solver)
                runs.append([(r.iteration, r.last_exploitability) for r in trace.records])
            iterations = [it for it, _ in runs[0]]
            curves[solver.algorithm] = dict(zip(iterations, np.mean([[v for _, v in run] for run in runs], axis=0)))

        ompo = curves[Algorithm.OMPO_EXACT]
        mpo = curves[Algorithm.MPO]
        # measured 0.215 against 0.307
        self.assertLessEqual(ompo[100], 0.8 * mpo[100])


if __name__ == "__main__":
    unittest.main(argv=sys.argv)
