"""
Runs every (environment seed x solver) pair of an experiment config and writes results.csv and
summary.csv. Runs may execute on several worker threads; rows are always written in
(seed, solver) order so the files do not depend on scheduling.
"""
import csv
import logging
import os
import pathlib
from collections import OrderedDict
from typing import List, Optional

import numpy as np
from filelock import FileLock

from prefgame.core.cache import GameCache
from prefgame.core.errors import ConfigurationError
from prefgame.core.scheduler import FailedJob, Job, Scheduler
from prefgame.data.config import ExperimentConfig, SolverConfig
from prefgame.data.trace import ResultRow, SolverTrace, format_float
from prefgame.envs import build_environment
from prefgame.solvers.runner import run_solver

l = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
SUMMARY_HEADER = [
    "algorithm",
    "iteration",
    "runs",
    "mean_last_iterate_exploitability",
    "std_last_iterate_exploitability",
    "mean_averaged_exploitability",
    "std_averaged_exploitability",
    "mean_nash_gap",
    "std_nash_gap",
]


def thread_count() -> int:
    raw = os.environ.get("THREADS", "1")
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigurationError("THREADS", f"expected a positive integer, got {raw!r}")
    if threads < 1:
        raise ConfigurationError("THREADS", f"expected a positive integer, got {raw!r}")
    return threads


class ResultsWriter:
    """
    Appends rows to results.csv under a file lock.
    """

    def __init__(self, out_dir: pathlib.Path):
        self.path = out_dir / RESULTS_FILE
        self.lock = FileLock(str(self.path) + ".lock")

    def write_header(self):
        with self.lock:
            with open(self.path, "w", newline="") as fp:
                csv.writer(fp, lineterminator="\n").writerow(ResultRow.header())

    def append(self, rows: List[ResultRow]):
        with self.lock:
            with open(self.path, "a", newline="") as fp:
                writer = csv.writer(fp, lineterminator="\n")
                for row in rows:
                    writer.writerow(row.to_csv())


def summarize(rows: List[ResultRow]) -> List[List[str]]:
    """
    Mean and standard deviation over environment seeds of every metric, per algorithm and
    iteration. Algorithms keep the order they first appear in.
    """
    groups = OrderedDict()
    for row in rows:
        groups.setdefault(row.algorithm, {}).setdefault(row.iteration, []).append(row)

    lines = []
    for algorithm, by_iteration in groups.items():
        for iteration in sorted(by_iteration):
            group = by_iteration[iteration]
            line = [algorithm, str(iteration), str(len(group))]
            for field in ("last_iterate_exploitability", "averaged_exploitability", "nash_gap"):
                values = np.array([getattr(r, field) for r in group])
                line += [format_float(values.mean()), format_float(values.std())]
            lines.append(line)
    return lines


def write_summary(out_dir: pathlib.Path, rows: List[ResultRow]):
    with open(out_dir / SUMMARY_FILE, "w", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        writer.writerows(summarize(rows))


def _run_one(cache: GameCache, seed: int, solver: SolverConfig, record_wall_time: bool) -> SolverTrace:
    return run_solver(cache.get_game(seed), solver, record_wall_time=record_wall_time)


def run_experiment(config: ExperimentConfig, out_dir: Optional[str] = None, threads: Optional[int] = None) -> List[ResultRow]:
    """
    @param out_dir: overrides config.output_dir
    @param threads: worker threads, defaults to the THREADS environment variable
    @return:        every row written to results.csv, in file order
    """
    out = pathlib.Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    threads = thread_count() if threads is None else threads

    seeds = [config.base_seed + i for i in range(config.seeds)]
    cache = GameCache(lambda seed: build_environment(config.environment, seed))
    writer = ResultsWriter(out)
    writer.write_header()

    l.info("running %d solvers on %d environments with %d thread(s)", len(config.solvers), len(seeds), threads)
    scheduler = Scheduler(num_workers=threads if threads > 1 else 0)
    rows: List[ResultRow] = []
    with scheduler:
        jobs = []
        for seed in seeds:
            for solver in config.solvers:
                job = Job(_run_one, cache, seed, solver, config.record_wall_time)
                jobs.append((seed, job))
                scheduler.schedule_job(job)

        for seed, job in jobs:
            job.finish_event.wait()
            if isinstance(job.ret_value, FailedJob):
                raise job.ret_value.reason
            new_rows = list(ResultRow.from_trace(seed, job.ret_value))
            writer.append(new_rows)
            rows += new_rows

    write_summary(out, rows)
    l.info("wrote %d result rows to %s", len(rows), out)
    return rows
