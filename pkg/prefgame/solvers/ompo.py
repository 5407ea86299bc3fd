"""
Optimistic mirror descent over occupancy measures. The update of every iteration solves an
entropy regularized planning problem for the extrapolated reward built from the opponent's
last two occupancy measures, either exactly through soft Bellman equations or approximately
by plugging in standard Q values.
"""
import logging
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp, rel_entr

from prefgame.core.dynamics import opponent_reward, policy_evaluation, policy_from_occupancy
from prefgame.core.errors import DomainError, NumericalError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import OccupancyMeasure, Policy
from prefgame.solvers.base import SolverState, merge_by_initial_state, mwu_update, stage_betas

l = logging.getLogger(__name__)


def _conditional(game: PreferenceGame, d: Union[np.ndarray, OccupancyMeasure], s1: Optional[int]) -> np.ndarray:
    if isinstance(d, OccupancyMeasure):
        return d.for_initial(int(game.initial_states[0]) if s1 is None else s1)
    return np.asarray(d, dtype=np.float64)


def optimistic_reward(game: PreferenceGame, d_t, d_prev, h: int, s1: Optional[int] = None) -> np.ndarray:
    """
    r~_h(s, a) = sum_{s', a'} (2 d_h^t(s', a') - d_h^{t-1}(s', a')) r(s, a, s', a').

    @param d_t:     occupancy of the current iterate, (H, S, A) or an OccupancyMeasure
    @param d_prev:  occupancy of the previous iterate, same form
    @param h:       0-based stage
    @param s1:      initial state the occupancies are conditioned on, when OccupancyMeasures are given
    @return:        S x A array
    """
    if not 0 <= h < game.horizon:
        raise DomainError(f"stage {h} is outside of [0, {game.horizon})")
    x, y = _conditional(game, d_t, s1), _conditional(game, d_prev, s1)
    if x.shape != y.shape:
        raise DomainError(f"occupancies of shapes {x.shape} and {y.shape} do not match")
    weights = (2.0 * x[h] - y[h]).reshape(-1)
    return (game.flat_reward @ weights).reshape(game.num_states, game.num_actions)


def optimistic_rewards(game: PreferenceGame, d_t: np.ndarray, d_prev: np.ndarray, side="max") -> np.ndarray:
    """
    The extrapolated reward of every stage at once for occupancies conditioned on one initial state.
    """
    return opponent_reward(game, 2.0 * d_t - d_prev, side=side)


def soft_bellman(game: PreferenceGame, policy: Policy, stage_rewards: np.ndarray, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Soft Bellman recursion with respect to the reference policy:
        Q_h = r_h + F V_{h+1}
        V_h(s) = (1 / beta_h) log sum_a policy_h(a|s) exp(beta_h Q_h(s, a)),   V_H = 0

    @return: Q[h, s, a], V[h, s] (V has H + 1 stages)
    """
    H, S = game.horizon, game.num_states
    betas = stage_betas(beta, H)
    Q = np.empty((H, S, game.num_actions))
    V = np.zeros((H + 1, S))
    for h in reversed(range(H)):
        Q[h] = stage_rewards[h] + game.transition @ V[h + 1]
        V[h] = logsumexp(betas[h] * Q[h], b=policy.probs[h], axis=-1) / betas[h]
    if not np.all(np.isfinite(V)):
        raise NumericalError("soft Bellman values overflowed")
    return Q, V


def _opponent_pair(state: SolverState, opponent: Optional[SolverState]):
    opponent = opponent if opponent is not None else state
    return opponent.d.d, opponent.d_prev.d


def optimistic_q(game: PreferenceGame, state: SolverState, beta: float, opponent: Optional[SolverState] = None,
                 side="max", soft=True) -> np.ndarray:
    """
    The Q values driving the next OMPO update of the player in `state`, against the occupancies
    of `opponent` (self-play when None). soft=True follows the soft Bellman equations, soft=False
    uses the standard Q of the extrapolated reward under the current policy.
    """
    d_opp, d_opp_prev = _opponent_pair(state, opponent)

    def per_initial(i, s1):
        rewards = optimistic_rewards(game, d_opp[i], d_opp_prev[i], side=side)
        if soft:
            return soft_bellman(game, state.pi, rewards, beta)[0]
        return policy_evaluation(game, state.pi, rewards)[0]

    return merge_by_initial_state(game, per_initial)


def ompo_exact_step(game: PreferenceGame, state: SolverState, beta: float, opponent: Optional[SolverState] = None,
                    side="max") -> Policy:
    """
    One OMPO iteration solved exactly. The new policy's occupancy maximizes the extrapolated
    reward minus the stage weighted conditional relative entropy to the current iterate.

    @param opponent:    the other player's state for explicit two-player runs, None for self-play
    @param side:        "max" for the player maximizing the preference, "min" for its opponent
    """
    q = optimistic_q(game, state, beta, opponent=opponent, side=side, soft=True)
    return mwu_update(state.pi, q, stage_betas(beta, game.horizon))


def ompo_approx_step(game: PreferenceGame, state: SolverState, beta: float, opponent: Optional[SolverState] = None,
                     side="max") -> Policy:
    q = optimistic_q(game, state, beta, opponent=opponent, side=side, soft=False)
    return mwu_update(state.pi, q, stage_betas(beta, game.horizon))


def two_player_ompo(game: PreferenceGame, beta: float, iterations: int,
                    initial: Optional[Policy] = None) -> Tuple[List[Policy], List[Policy]]:
    """
    Runs OMPO with two explicit players, the second one minimizing the preference of the first.

    @return: the policy sequences of both players, initial policies included
    """
    max_state = SolverState.initial(game, initial)
    min_state = SolverState.initial(game, initial)
    max_seq, min_seq = [max_state.pi], [min_state.pi]
    for _ in range(iterations):
        new_max = ompo_exact_step(game, max_state, beta, opponent=min_state, side="max")
        new_min = ompo_exact_step(game, min_state, beta, opponent=max_state, side="min")
        max_state = max_state.advance(game, new_max)
        min_state = min_state.advance(game, new_min)
        max_seq.append(new_max)
        min_seq.append(new_min)
    return max_seq, min_seq


def mirror_descent_objective(game: PreferenceGame, d: np.ndarray, reference: Policy, stage_rewards: np.ndarray,
                             beta: float) -> float:
    """
    sum_h [<d_h, r_h> - (1 / beta) sum_{h' <= h} KL_h'(d || reference)] for an occupancy d[h, s, a]
    conditioned on one initial state, where KL_h' is the relative entropy of the policies
    weighted by the state distribution of d at stage h'.
    """
    d = np.asarray(d, dtype=np.float64)
    H = game.horizon
    own = policy_from_occupancy(d)
    state_mass = d.sum(axis=-1)
    kl = np.einsum("hs,hs->h", state_mass, rel_entr(own.probs, reference.probs).sum(axis=-1))
    # the divergence of stage h' enters the H - h' partial sums that follow it
    remaining = H - np.arange(H)
    return float(np.sum(d * stage_rewards) - np.sum(remaining * kl) / beta)
