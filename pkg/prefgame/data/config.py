import math
from typing import Dict, List, Optional

from prefgame.core.errors import ConfigurationError
from prefgame.data.artifact import Artifact
from prefgame.data.game import PreferenceGame


class PreferenceKind:
    SCORE_SIGMOID = "score_sigmoid"
    CYCLIC = "cyclic"
    RANDOM_ANTISYMMETRIC = "random_antisymmetric"
    TIE = "tie"
    VOTERS = "voters"

    ALL = (SCORE_SIGMOID, CYCLIC, RANDOM_ANTISYMMETRIC, TIE, VOTERS)


class Algorithm:
    OMPO_EXACT = "ompo_exact"
    OMPO_APPROX = "ompo_approx"
    MPO = "mpo"
    OMPO_REGRESSION = "ompo_regression"
    MPO_REGRESSION = "mpo_regression"

    ALL = (OMPO_EXACT, OMPO_APPROX, MPO, OMPO_REGRESSION, MPO_REGRESSION)
    OMPO_FAMILY = (OMPO_EXACT, OMPO_APPROX, OMPO_REGRESSION)


def _require(cond, key, message):
    if not cond:
        raise ConfigurationError(key, message)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


class PreferenceSpec(Artifact):
    """
    Describes how a reward tensor is generated.

    :ivar str kind:             one of PreferenceKind.ALL
    :ivar list scores:          per (s, a) scores for score_sigmoid (drawn from N(0, scale^2) when missing)
    :ivar float scale:          score scale for drawn scores
    :ivar float p:              winning probability of the cyclic preference
    :ivar list orderings:       per voter rankings of the actions, best first, for voters
    :ivar int seed:             seed for random kinds (the generator's own stream when missing)
    :ivar bool terminal_only:   only the last layer of layered environments carries preferences
    """

    __slots__ = (
        "kind",
        "scores",
        "scale",
        "p",
        "orderings",
        "seed",
        "terminal_only",
    )

    def __init__(self, kind=PreferenceKind.RANDOM_ANTISYMMETRIC, scores=None, scale=1.0, p=2.0 / 3.0,
                 orderings=None, seed=None, terminal_only=False):
        self.kind = kind
        self.scores = scores
        self.scale = scale
        self.p = p
        self.orderings = orderings
        self.seed = seed
        self.terminal_only = terminal_only
        self.validate()

    def __setstate__(self, state):
        defaults = PreferenceSpec()
        for k in self.__slots__:
            setattr(self, k, state.get(k, getattr(defaults, k)))
        self.validate()

    def validate(self, prefix="preference"):
        _require(self.kind in PreferenceKind.ALL, f"{prefix}.kind", f"must be one of {', '.join(PreferenceKind.ALL)}")
        _require(0.0 <= float(self.p) <= 1.0, f"{prefix}.p", "must lie in [0, 1]")
        _require(float(self.scale) >= 0.0, f"{prefix}.scale", "must be nonnegative")
        _require(self.seed is None or _is_int(self.seed), f"{prefix}.seed", "must be an integer")
        if self.kind == PreferenceKind.VOTERS:
            _require(bool(self.orderings), f"{prefix}.orderings", "voters need at least one ordering")


class GridworldSpec(Artifact):
    """
    Random gridworld generator settings. Sizes are drawn uniformly from the closed intervals.
    """

    __slots__ = (
        "seed",
        "state_range",
        "action_range",
        "horizon",
        "transition_sparsity",
        "preference",
    )

    def __init__(self, seed=0, state_range=(1, 100), action_range=(2, 10), horizon=10, transition_sparsity=0.25,
                 preference=None):
        self.seed = seed
        self.state_range = tuple(state_range)
        self.action_range = tuple(action_range)
        self.horizon = horizon
        self.transition_sparsity = transition_sparsity
        self.preference = preference if preference is not None else PreferenceSpec()
        self.validate()

    def __setstate__(self, state):
        pref = state.get("preference", None)
        self.__init__(
            seed=state.get("seed", 0),
            state_range=state.get("state_range", (1, 100)),
            action_range=state.get("action_range", (2, 10)),
            horizon=state.get("horizon", 10),
            transition_sparsity=state.get("transition_sparsity", 0.25),
            preference=PreferenceSpec.load(pref) if isinstance(pref, dict) else pref,
        )

    def __getstate__(self):
        state = super(GridworldSpec, self).__getstate__()
        state["state_range"] = list(self.state_range)
        state["action_range"] = list(self.action_range)
        return state

    def validate(self, prefix="environment"):
        for key in ("state_range", "action_range"):
            rng = getattr(self, key)
            _require(len(rng) == 2 and all(_is_int(v) for v in rng), f"{prefix}.{key}", "must be two integers")
        _require(_is_int(self.seed), f"{prefix}.seed", "must be an integer")
        _require(_is_int(self.horizon) and self.horizon >= 1, f"{prefix}.horizon", "must be a positive integer")
        _require(0.0 < float(self.transition_sparsity) <= 1.0, f"{prefix}.transition_sparsity", "must lie in (0, 1]")
        self.preference.validate(prefix=f"{prefix}.preference")


class SolverConfig(Artifact):
    """
    :ivar str algorithm:        one of Algorithm.ALL
    :ivar float beta:           learning rate, None selects the default of the algorithm
    :ivar int iterations:       number of policy updates T
    :ivar int eval_every:       record metrics every eval_every iterations (and at T)
    :ivar int seed:             seed of the Monte-Carlo estimators (exact variants ignore it)
    :ivar int inner_steps:      gradient steps of the regression variants
    :ivar float inner_step_size: gradient step size of the regression variants
    :ivar int mc_samples:       0 regresses on exact Q values, K > 0 on Monte-Carlo estimates
    """

    __slots__ = (
        "algorithm",
        "beta",
        "iterations",
        "eval_every",
        "seed",
        "inner_steps",
        "inner_step_size",
        "mc_samples",
    )

    def __init__(self, algorithm=Algorithm.OMPO_EXACT, beta=None, iterations=100, eval_every=1, seed=0,
                 inner_steps=200, inner_step_size=0.5, mc_samples=0):
        self.algorithm = algorithm
        self.beta = beta
        self.iterations = iterations
        self.eval_every = eval_every
        self.seed = seed
        self.inner_steps = inner_steps
        self.inner_step_size = inner_step_size
        self.mc_samples = mc_samples
        self.validate()

    def __setstate__(self, state):
        defaults = SolverConfig()
        for k in self.__slots__:
            setattr(self, k, state.get(k, getattr(defaults, k)))
        self.validate()

    def validate(self, prefix="solver"):
        _require(self.algorithm in Algorithm.ALL, f"{prefix}.algorithm", f"must be one of {', '.join(Algorithm.ALL)}")
        _require(
            self.beta is None or (isinstance(self.beta, (int, float)) and not isinstance(self.beta, bool) and self.beta > 0),
            f"{prefix}.beta", "must be a positive number"
        )
        _require(_is_int(self.iterations) and self.iterations >= 0, f"{prefix}.iterations", "must be a nonnegative integer")
        _require(_is_int(self.eval_every) and self.eval_every >= 1, f"{prefix}.eval_every", "must be a positive integer")
        _require(_is_int(self.seed), f"{prefix}.seed", "must be an integer")
        _require(_is_int(self.inner_steps) and self.inner_steps >= 0, f"{prefix}.inner_steps", "must be a nonnegative integer")
        _require(float(self.inner_step_size) > 0, f"{prefix}.inner_step_size", "must be positive")
        _require(_is_int(self.mc_samples) and self.mc_samples >= 0, f"{prefix}.mc_samples", "must be a nonnegative integer")

    def resolve_beta(self, game: PreferenceGame) -> float:
        if self.beta is not None:
            return float(self.beta)
        if self.algorithm in Algorithm.OMPO_FAMILY:
            return 1.0 / math.sqrt(2.0)
        # log(1 / pi_min) for the uniform initial policy
        log_inv_pi = math.log(max(game.num_actions, 2))
        return math.sqrt(log_inv_pi / (max(self.iterations, 1) * game.horizon ** 2))


class ExperimentConfig(Artifact):
    """
    :ivar dict environment:     {generator = "...", ...parameters} or {path = "game.toml"}
    :ivar list solvers:         SolverConfigs, run on every environment seed
    :ivar int seeds:            number of environment seeds
    :ivar int base_seed:        environment seeds are base_seed, base_seed + 1, ...
    :ivar str output_dir:       where results.csv and summary.csv are written
    :ivar int eval_every:       default eval schedule for solvers that do not set one
    :ivar bool record_wall_time: write measured elapsed_ms (otherwise 0, keeping outputs bitwise reproducible)
    """

    __slots__ = (
        "environment",
        "solvers",
        "seeds",
        "base_seed",
        "output_dir",
        "eval_every",
        "record_wall_time",
    )

    def __init__(self, environment: Dict, solvers: List[SolverConfig], seeds=1, base_seed=0, output_dir="results",
                 eval_every=None, record_wall_time=False):
        self.environment = environment
        self.solvers = solvers
        self.seeds = seeds
        self.base_seed = base_seed
        self.output_dir = output_dir
        self.eval_every = eval_every
        self.record_wall_time = record_wall_time
        self.validate()

    def __getstate__(self):
        state = super(ExperimentConfig, self).__getstate__()
        state["solvers"] = [s.__getstate__() for s in self.solvers]
        return state

    def __setstate__(self, state):
        if not isinstance(state, dict):
            raise ConfigurationError("<root>", "must be a table")
        for key in state:
            _require(key in self.__slots__, key, "unknown key")

        env = state.get("environment", None)
        _require(isinstance(env, dict), "environment", "missing or not a table")
        eval_every = state.get("eval_every", None)
        _require(eval_every is None or (_is_int(eval_every) and eval_every >= 1), "eval_every", "must be a positive integer")

        raw_solvers = state.get("solvers", None)
        _require(isinstance(raw_solvers, list) and len(raw_solvers) > 0, "solvers", "needs at least one solver entry")
        solvers = []
        for i, raw in enumerate(raw_solvers):
            _require(isinstance(raw, dict), f"solvers[{i}]", "must be a table")
            for key in raw:
                _require(key in SolverConfig.__slots__, f"solvers[{i}].{key}", "unknown key")
            raw = dict(raw)
            if eval_every is not None:
                raw.setdefault("eval_every", eval_every)
            try:
                solvers.append(SolverConfig.load(raw))
            except ConfigurationError as e:
                raise ConfigurationError(e.key.replace("solver", f"solvers[{i}]", 1), e.message)

        self.__init__(
            env, solvers,
            seeds=state.get("seeds", 1),
            base_seed=state.get("base_seed", 0),
            output_dir=state.get("output_dir", "results"),
            eval_every=eval_every,
            record_wall_time=state.get("record_wall_time", False),
        )

    def validate(self):
        _require(_is_int(self.seeds) and self.seeds >= 1, "seeds", "must be a positive integer")
        _require(_is_int(self.base_seed), "base_seed", "must be an integer")
        _require(isinstance(self.output_dir, str) and self.output_dir, "output_dir", "must be a path")
        _require(isinstance(self.record_wall_time, bool), "record_wall_time", "must be a boolean")
        _require(len(self.solvers) >= 1, "solvers", "needs at least one solver entry")
        _require(
            ("generator" in self.environment) != ("path" in self.environment),
            "environment", "needs exactly one of 'generator' or 'path'"
        )
