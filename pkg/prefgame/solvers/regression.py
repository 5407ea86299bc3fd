"""
The squared-loss form of the policy update used when policies are trained by regression
instead of by the closed-form multiplicative weights. The log-partition function is replaced
by its value at a tie, beta * (remaining stages) / 2, which makes tie games a fixed point.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from prefgame.core.dynamics import reachable_states
from prefgame.core.errors import DomainError, NumericalError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy
from prefgame.estimation import mc_q_ompo
from prefgame.solvers.base import SolverState
from prefgame.solvers.mpo import mpo_q
from prefgame.solvers.ompo import optimistic_q

l = logging.getLogger(__name__)

DEFAULT_STEPS = 200
DEFAULT_STEP_SIZE = 0.5


def tie_values(game: PreferenceGame) -> np.ndarray:
    """
    (H - h) / 2 at every stage: the value of any (s, a) when all comparisons are ties.
    """
    return (game.horizon - np.arange(game.horizon, dtype=np.float64)) / 2.0


def regression_targets(game: PreferenceGame, pi_t: Policy, q_hat: np.ndarray, beta: float) -> np.ndarray:
    """
    log pi_t(a|s) + beta Q(s, a) - beta (H - h) / 2
    """
    return pi_t.log_probs + beta * q_hat - beta * tie_values(game)[:, None, None]


def regression_loss(logits: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Squared error between log softmax(logits) and the targets, weighted by the current policy
    with the weights held fixed, summed over all stages and states.

    @return: loss, gradient with respect to the logits
    """
    log_pi = log_softmax(logits, axis=-1)
    pi = np.exp(log_pi)
    with np.errstate(invalid="ignore"):
        err = log_pi - targets
    # actions that pi_t never plays have -inf targets and carry no weight
    err = np.where(pi > 0, err, 0.0)
    loss = float(np.sum(pi * err ** 2))
    mean_err = np.sum(pi * err, axis=-1, keepdims=True)
    grad = 2.0 * pi * (err - mean_err)
    return loss, grad


def regression_update(game: PreferenceGame, state: SolverState, beta: float, q_hat: np.ndarray,
                      steps: int = DEFAULT_STEPS, step_size: float = DEFAULT_STEP_SIZE) -> Policy:
    """
    Full-batch gradient descent on tabular logits, starting from log pi_t. The stationary point
    is the multiplicative-weights update pi_t exp(beta Q) with the flat learning rate beta.

    @param q_hat:   Q values to regress on, exact or estimated, H x S x A
    """
    if steps < 0:
        raise DomainError(f"the number of inner steps must be nonnegative, got {steps}")

    targets = regression_targets(game, state.pi, q_hat, beta)
    logits = state.pi.log_probs.copy()
    finite = np.isfinite(logits)
    logits[~finite] = -np.inf
    loss = None
    for _ in range(steps):
        loss, grad = regression_loss(logits, targets)
        if not np.isfinite(loss):
            raise NumericalError(f"regression loss is {loss}")
        logits = np.where(finite, logits - step_size * grad, -np.inf)

    if loss is not None:
        l.debug("regression update finished with loss %.3e", loss)
    return Policy(softmax(logits, axis=-1))


def estimate_q(game: PreferenceGame, state: SolverState, optimistic: bool, mc_samples: int,
               rng: np.random.Generator) -> np.ndarray:
    """
    Monte-Carlo Q values at every reachable (stage, state, action). Unreachable entries get the
    tie value so they leave the policy unchanged.
    """
    q = np.broadcast_to(tie_values(game)[:, None, None], state.pi.probs.shape).copy()
    pi_prev = state.pi_prev if optimistic else None
    for s1 in game.initial_states:
        for h, stage in enumerate(reachable_states(game, int(s1))):
            for s in sorted(stage):
                for a in range(game.num_actions):
                    q[h, s, a] = mc_q_ompo(game, state.pi, pi_prev, h, s, a, mc_samples, rng).estimate
    return q


def regression_q(game: PreferenceGame, state: SolverState, beta: float, optimistic: bool, mc_samples: int = 0,
                 rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    The Q values the regression variants fit: the OMPO expectation form (optimistic) or the
    self-play Q of natural actor-critic, exact unless mc_samples > 0.
    """
    if mc_samples > 0:
        return estimate_q(game, state, optimistic, mc_samples, rng if rng is not None else np.random.default_rng(0))
    if optimistic:
        return optimistic_q(game, state, beta, soft=False)
    return mpo_q(game, state.pi)
