from typing import Optional, Sequence

import numpy as np

from prefgame.core.dynamics import policy_from_occupancy
from prefgame.core.errors import DomainError
from prefgame.data.policy import OccupancyMeasure, Policy


class OccupancyAverager:
    """
    Running mean of the occupancy measures of a sequence of iterates. The policy realizing the
    mean occupancy is the trajectory-level mixture of the iterates.
    """

    def __init__(self):
        self._total: Optional[np.ndarray] = None
        self._initial_states = None
        self.count = 0

    def add(self, occupancy: OccupancyMeasure):
        if self._total is None:
            self._total = np.zeros_like(occupancy.d)
            self._initial_states = occupancy.initial_states
        elif occupancy.d.shape != self._total.shape:
            raise DomainError(f"occupancy of shape {occupancy.d.shape} does not match the history {self._total.shape}")
        self._total += occupancy.d
        self.count += 1

    def mean(self) -> OccupancyMeasure:
        if self.count == 0:
            raise DomainError("no occupancy measure has been added")
        return OccupancyMeasure(self._initial_states, self._total / self.count)

    def policy(self) -> Policy:
        return policy_from_occupancy(self.mean())


def averaged_policy(occupancy_history: Sequence[OccupancyMeasure]) -> Policy:
    """
    pi_h(a|s) = sum_t d^t_h(s, a) / sum_t d^t_h(s). Its occupancy is the stagewise mean of the history.
    """
    if len(occupancy_history) == 0:
        raise DomainError("cannot average an empty history")
    averager = OccupancyAverager()
    for d in occupancy_history:
        averager.add(d)
    return averager.policy()
