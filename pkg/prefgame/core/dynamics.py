"""
Exact dynamic-programming primitives every solver and metric builds on. All functions are pure;
stages are 0-based, so stage h of the code is stage h+1 of the usual 1-based notation.
"""
import logging
from typing import List, Set, Tuple, Union

import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import OccupancyMeasure, PairwiseValues, Policy

l = logging.getLogger(__name__)

FLOW_TOL = 1e-8


def reachable_states(game: PreferenceGame, s1: int) -> List[Set[int]]:
    """
    Breadth-first search of the states reachable at each stage from s1 under some policy.

    @return: one set of states per stage
    """
    support = np.any(game.transition > 0, axis=1)
    stages = [{int(s1)}]
    for _ in range(game.horizon - 1):
        frontier = sorted(stages[-1])
        nxt = np.flatnonzero(np.any(support[frontier], axis=0)) if frontier else []
        stages.append(set(int(s) for s in nxt))
    return stages


def occupancy_forward(game: PreferenceGame, policy: Policy, s1: int) -> np.ndarray:
    """
    Forward recursion of the occupancy measure conditioned on the initial state s1.

    @return: d[h, s, a]
    """
    game.initial_index(s1)
    policy.check_compatible(game)

    d = np.zeros((game.horizon, game.num_states, game.num_actions))
    mass = np.zeros(game.num_states)
    mass[s1] = 1.0
    for h in range(game.horizon):
        d[h] = mass[:, None] * policy.probs[h]
        mass = np.einsum("sa,sap->p", d[h], game.transition)
    return d


def occupancy_measure(game: PreferenceGame, policy: Policy) -> OccupancyMeasure:
    starts = game.initial_states
    return OccupancyMeasure(starts, np.stack([occupancy_forward(game, policy, int(s1)) for s1 in starts]))


def flow_residual(game: PreferenceGame, d: Union[np.ndarray, OccupancyMeasure], s1: int) -> float:
    """
    Largest violation of the Bellman flow constraints by d[h, s, a] (conditioned on s1),
    including the initial-stage condition sum_a d_1(s, a) = 1{s = s1}.
    """
    if isinstance(d, OccupancyMeasure):
        d = d.for_initial(s1)
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (game.horizon, game.num_states, game.num_actions):
        raise DomainError(f"occupancy shape {d.shape} does not match the game")

    marginals = d.sum(axis=-1)
    start = np.zeros(game.num_states)
    start[s1] = 1.0
    residual = np.abs(marginals[0] - start).max()
    for h in range(game.horizon - 1):
        inflow = np.einsum("sa,sap->p", d[h], game.transition)
        residual = max(residual, np.abs(marginals[h + 1] - inflow).max())
    return float(residual)


def policy_from_occupancy(d: Union[np.ndarray, OccupancyMeasure]) -> Policy:
    """
    pi_h(a|s) = d_h(s, a) / sum_a d_h(s, a), uniform where the state has no mass.

    Occupancies conditioned on different initial states live on disjoint sets of states,
    so they are summed before normalizing.
    """
    if isinstance(d, OccupancyMeasure):
        d = d.d
    d = np.asarray(d, dtype=np.float64)
    if d.ndim == 4:
        d = d.sum(axis=0)
    if d.ndim != 3:
        raise DomainError(f"occupancy must have shape (H, S, A) or (I, H, S, A), got {d.shape}")

    mass = d.sum(axis=-1, keepdims=True)
    uniform = np.full_like(d, 1.0 / d.shape[-1])
    probs = np.where(mass > 0, d / np.where(mass > 0, mass, 1.0), uniform)
    return Policy(probs)


#
# Backups
#

def pairwise_backup(game: PreferenceGame, pi: Policy, pi_prime: Policy) -> PairwiseValues:
    """
    Backward recursion of the pair-wise value functions
        Q_h(s,a,s',a') = r(s,a,s',a') + E_{f(.|s,a), f(.|s',a')} V_{h+1}
        V_h(s,s')      = E_{pi_h(.|s), pi'_h(.|s')} Q_h(s,a,s',a')
    from V_H = 0. Dense: memory grows as (S*A)^2 * H.
    """
    pi.check_compatible(game)
    pi_prime.check_compatible(game)

    H, S, A = game.horizon, game.num_states, game.num_actions
    F = game.transition
    Q = np.empty((H, S, A, S, A))
    V = np.zeros((H + 1, S, S))
    for h in reversed(range(H)):
        cont = np.einsum("sap,bcq,pq->sabc", F, F, V[h + 1], optimize=True)
        Q[h] = game.reward + cont
        V[h] = np.einsum("sa,sabc,bc->sb", pi.probs[h], Q[h], pi_prime.probs[h], optimize=True)
    return PairwiseValues(Q, V)


def policy_evaluation(game: PreferenceGame, policy: Policy, stage_rewards: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Single player backup for a per-stage reward r[h, s, a]:
        Q_h = r_h + F V_{h+1},   V_h(s) = <pi_h(.|s), Q_h(s, .)>,   V_H = 0.

    @return: Q[h, s, a], V[h, s] (V has H + 1 stages)
    """
    H, S = game.horizon, game.num_states
    Q = np.empty_like(stage_rewards, dtype=np.float64)
    V = np.zeros((H + 1, S))
    for h in reversed(range(H)):
        Q[h] = stage_rewards[h] + game.transition @ V[h + 1]
        V[h] = np.einsum("sa,sa->s", policy.probs[h], Q[h])
    return Q, V


def opponent_reward(game: PreferenceGame, d_opponent: np.ndarray, side="max") -> np.ndarray:
    """
    The single player reward induced by an opponent with per-stage occupancy d_opponent[h, s', a'].

    For side="max" this is r_h(s, a) = sum_{s',a'} d_h(s', a') r(s, a, s', a'), the reward of the player
    whose preference is being maximized. For side="min" it is the reward of the minimizing player,
    -sum_{s',a'} d_h(s', a') r(s', a', s, a).
    """
    H, S, A = d_opponent.shape
    flat = d_opponent.reshape(H, S * A)
    if side == "max":
        out = flat @ game.flat_reward.T
    elif side == "min":
        out = -(flat @ game.flat_reward)
    else:
        raise DomainError(f"unknown side {side}")
    return out.reshape(H, S, A)


#
# Objective
#

def game_value(game: PreferenceGame, pi: Policy, pi_prime: Policy) -> float:
    """
    <nu_1, V^{pi, pi'}>: the expected cumulative preference of pi over pi' when both start in the
    same initial state.
    """
    values = pairwise_backup(game, pi, pi_prime)
    starts = game.initial_states
    return float(np.dot(game.initial_dist[starts], values.V[0][starts, starts]))


def bilinear_objective(game: PreferenceGame, d: OccupancyMeasure, d_prime: OccupancyMeasure) -> float:
    """
    E_{s1 ~ nu_1} sum_h <d_h(.|s1), r d'_h(.|s1)>: the game written over occupancy measures.
    """
    total = 0.0
    for i, s1 in enumerate(game.initial_states):
        x, y = d.for_initial(s1), d_prime.for_initial(s1)
        for occ in (x, y):
            residual = flow_residual(game, occ, int(s1))
            if residual > FLOW_TOL:
                raise DomainError(f"occupancy violates the flow constraints from state {s1} by {residual:.3e}")

        H = game.horizon
        rewards = opponent_reward(game, y)
        total += game.initial_dist[s1] * float(np.sum(x.reshape(H, -1) * rewards.reshape(H, -1)))
    return float(total)


def self_play_value(game: PreferenceGame, policy: Policy) -> float:
    d = occupancy_measure(game, policy)
    return bilinear_objective(game, d, d)
