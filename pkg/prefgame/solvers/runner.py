import logging
import time
from typing import Callable, Dict

import numpy as np

from prefgame.core.dynamics import self_play_value
from prefgame.core.errors import DomainError, NumericalError
from prefgame.core.validation import validate_game
from prefgame.data.config import Algorithm, SolverConfig
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy
from prefgame.data.trace import SolverTrace, TraceRecord
from prefgame.metrics import exploitability, nash_gap
from prefgame.solvers.averaging import OccupancyAverager
from prefgame.solvers.base import SolverState
from prefgame.solvers.mpo import mpo_step
from prefgame.solvers.ompo import ompo_approx_step, ompo_exact_step
from prefgame.solvers.regression import regression_q, regression_update

l = logging.getLogger(__name__)

SELF_PLAY_TOL = 1e-8

StepFn = Callable[[PreferenceGame, SolverState, float, SolverConfig, np.random.Generator], Policy]


def _ompo_exact(game, state, beta, config, rng):
    return ompo_exact_step(game, state, beta)


def _ompo_approx(game, state, beta, config, rng):
    return ompo_approx_step(game, state, beta)


def _mpo(game, state, beta, config, rng):
    return mpo_step(game, state.pi, beta)


def _regression(optimistic):
    def step(game, state, beta, config, rng):
        q_hat = regression_q(game, state, beta, optimistic, mc_samples=config.mc_samples, rng=rng)
        return regression_update(
            game, state, beta, q_hat, steps=config.inner_steps, step_size=config.inner_step_size
        )
    return step


STEPS: Dict[str, StepFn] = {
    Algorithm.OMPO_EXACT: _ompo_exact,
    Algorithm.OMPO_APPROX: _ompo_approx,
    Algorithm.MPO: _mpo,
    Algorithm.OMPO_REGRESSION: _regression(optimistic=True),
    Algorithm.MPO_REGRESSION: _regression(optimistic=False),
}


def evaluate(game: PreferenceGame, iteration: int, last: Policy, averaged: Policy, elapsed_ms: float) -> TraceRecord:
    value = self_play_value(game, last)
    if abs(value - game.self_play_value) > SELF_PLAY_TOL:
        raise NumericalError(f"self-play value {value:.12g} differs from H/2 = {game.self_play_value}")
    return TraceRecord(
        iteration,
        exploitability(game, last),
        exploitability(game, averaged),
        nash_gap(game, averaged)[0],
        value,
        elapsed_ms=elapsed_ms,
    )


def run_solver(game: PreferenceGame, config: SolverConfig, record_wall_time=False) -> SolverTrace:
    """
    Self-play loop: a single policy plays against itself for config.iterations updates.
    Metrics are recorded every config.eval_every iterations and after the last one.
    The averaged iterate after t updates realizes the mean occupancy of the policies
    the updates started from.

    @param record_wall_time:    store measured elapsed time, otherwise 0 so traces are reproducible
    """
    violations = validate_game(game)
    if violations:
        raise DomainError(f"{game.summary()} is not a valid preference game: {violations[0]}")
    config.validate()

    step = STEPS[config.algorithm]
    beta = config.resolve_beta(game)
    rng = np.random.default_rng(config.seed)
    T = config.iterations

    l.info("running %s on %s for %d iterations (beta=%.4g)", config.algorithm, game.summary(), T, beta)
    trace = SolverTrace(config.algorithm, beta, T)
    state = SolverState.initial(game)
    averager = OccupancyAverager()
    start = time.perf_counter()
    for t in range(1, T + 1):
        averager.add(state.d)
        state = state.advance(game, step(game, state, beta, config, rng))

        if t % config.eval_every == 0 or t == T:
            elapsed_ms = (time.perf_counter() - start) * 1000.0 if record_wall_time else 0.0
            record = evaluate(game, t, state.pi, averager.policy(), elapsed_ms)
            trace.add_record(record)
            l.debug(
                "%s t=%d last=%.3e averaged=%.3e", config.algorithm, t, record.last_exploitability,
                record.averaged_exploitability
            )

    trace.last_policy = state.pi
    trace.averaged_policy = averager.policy() if averager.count else state.pi
    final = trace.final_record
    if final is not None:
        l.info(
            "%s finished: last-iterate exploitability %.3e, averaged %.3e", config.algorithm,
            final.last_exploitability, final.averaged_exploitability
        )
    return trace
