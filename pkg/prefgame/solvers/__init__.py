from .base import SolverState, stage_betas, mwu_update
from .ompo import (
    optimistic_reward, optimistic_rewards, optimistic_q, soft_bellman, ompo_exact_step, ompo_approx_step,
    two_player_ompo, mirror_descent_objective
)
from .mpo import mpo_q, mpo_step
from .averaging import OccupancyAverager, averaged_policy
from .regression import regression_update, regression_q, regression_loss, regression_targets
from .runner import run_solver, STEPS
