from typing import Iterable, List, Optional

from sortedcontainers import SortedDict

from prefgame.data.artifact import Artifact
from prefgame.data.policy import Policy


def format_float(v) -> str:
    return "{:.12g}".format(float(v))


class TraceRecord(Artifact):
    """
    Metrics of one evaluation point of a solver run.
    """

    __slots__ = (
        "iteration",
        "last_exploitability",
        "averaged_exploitability",
        "nash_gap",
        "self_play_value",
        "elapsed_ms",
    )

    def __init__(self, iteration, last_exploitability, averaged_exploitability, nash_gap, self_play_value,
                 elapsed_ms=0.0):
        self.iteration = int(iteration)
        self.last_exploitability = float(last_exploitability)
        self.averaged_exploitability = float(averaged_exploitability)
        self.nash_gap = float(nash_gap)
        self.self_play_value = float(self_play_value)
        self.elapsed_ms = float(elapsed_ms)


class SolverTrace:
    """
    Everything a solver run produces: the evaluation records keyed by iteration and the final
    last-iterate and averaged policies.
    """

    def __init__(self, algorithm: str, beta: float, iterations: int):
        self.algorithm = algorithm
        self.beta = beta
        self.iterations = iterations
        self._records = SortedDict()
        self.last_policy: Optional[Policy] = None
        self.averaged_policy: Optional[Policy] = None

    def add_record(self, record: TraceRecord):
        self._records[record.iteration] = record

    @property
    def records(self) -> List[TraceRecord]:
        return list(self._records.values())

    def record_at(self, iteration: int) -> TraceRecord:
        return self._records[iteration]

    @property
    def final_record(self) -> Optional[TraceRecord]:
        if not self._records:
            return None
        return self._records.peekitem(-1)[1]

    def first_iteration_below(self, threshold: float, averaged=False) -> Optional[int]:
        """
        The first recorded iteration whose exploitability is at most `threshold`.
        """
        for it, record in self._records.items():
            value = record.averaged_exploitability if averaged else record.last_exploitability
            if value <= threshold:
                return it
        return None

    def __len__(self):
        return len(self._records)

    def __repr__(self):
        return f"<SolverTrace {self.algorithm} beta={self.beta:.4g} records={len(self)}>"


class ResultRow(Artifact):
    """
    One line of results.csv. Column order is the slot order.
    """

    __slots__ = (
        "env_seed",
        "algorithm",
        "iteration",
        "last_iterate_exploitability",
        "averaged_exploitability",
        "nash_gap",
        "elapsed_ms",
    )

    def __init__(self, env_seed, algorithm, iteration, last_iterate_exploitability, averaged_exploitability,
                 nash_gap, elapsed_ms):
        self.env_seed = env_seed
        self.algorithm = algorithm
        self.iteration = iteration
        self.last_iterate_exploitability = last_iterate_exploitability
        self.averaged_exploitability = averaged_exploitability
        self.nash_gap = nash_gap
        self.elapsed_ms = elapsed_ms

    @classmethod
    def header(cls):
        return list(cls.__slots__)

    @classmethod
    def from_trace(cls, env_seed: int, trace: SolverTrace) -> Iterable["ResultRow"]:
        for r in trace.records:
            yield cls(
                env_seed, trace.algorithm, r.iteration, r.last_exploitability, r.averaged_exploitability,
                r.nash_gap, r.elapsed_ms
            )

    def to_csv(self) -> List[str]:
        return [
            str(self.env_seed),
            self.algorithm,
            str(self.iteration),
            format_float(self.last_iterate_exploitability),
            format_float(self.averaged_exploitability),
            format_float(self.nash_gap),
            format_float(self.elapsed_ms),
        ]
