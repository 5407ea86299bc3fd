from prefgame.data.artifact import Artifact
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy, OccupancyMeasure, PairwiseValues
from prefgame.data.config import PreferenceSpec, GridworldSpec, SolverConfig, ExperimentConfig, Algorithm, PreferenceKind
from prefgame.data.trace import TraceRecord, SolverTrace, ResultRow
