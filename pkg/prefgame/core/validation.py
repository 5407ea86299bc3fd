import logging
from typing import List

import numpy as np

from prefgame.core.dynamics import reachable_states
from prefgame.data.game import STOCHASTIC_TOL, PreferenceGame

l = logging.getLogger(__name__)

ANTISYMMETRY_TOL = 1e-12
MAX_REPORTED = 50


class ViolationKind:
    STOCHASTIC = "stochasticity"
    INITIAL = "initial distribution"
    REWARD_RANGE = "reward range"
    ANTISYMMETRY = "antisymmetry"
    SEPARABILITY = "separability"
    PARTITION = "init partition"
    TRUNCATED = "truncated"


class Violation:
    __slots__ = (
        "kind",
        "location",
        "message",
    )

    def __init__(self, kind, location, message):
        self.kind = kind
        self.location = location
        self.message = message

    def __str__(self):
        return f"[{self.kind}] {self.location}: {self.message}"

    def __repr__(self):
        return f"<Violation {self}>"


def validate_game(game: PreferenceGame) -> List[Violation]:
    """
    Checks the modelling assumptions of a preference game and reports every violation found.
    An empty report means the game is valid. This never raises.

    @param game:
    @return: list of Violations
    """
    report = []
    report += _check_stochastic(game)
    report += _check_reward(game)
    report += _check_separability(game)
    if report:
        l.debug("game %s has %d violations", game.summary(), len(report))
    return report


def _check_stochastic(game: PreferenceGame) -> List[Violation]:
    report = []
    sums = game.transition.sum(axis=-1)
    negative = np.any(game.transition < 0, axis=-1)
    bad = (np.abs(sums - 1.0) > STOCHASTIC_TOL) | negative
    for s, a in np.argwhere(bad):
        report.append(Violation(
            ViolationKind.STOCHASTIC, f"transition[{s}][{a}]",
            f"row sums to {sums[s, a]:.12g}" + (" and has negative entries" if negative[s, a] else "")
        ))

    total = game.initial_dist.sum()
    if abs(total - 1.0) > STOCHASTIC_TOL or np.any(game.initial_dist < 0):
        report.append(Violation(ViolationKind.INITIAL, "initial_dist", f"sums to {total:.12g}"))
    return _truncate(report)


def _check_reward(game: PreferenceGame) -> List[Violation]:
    report = []
    r = game.reward
    for idx in np.argwhere((r < 0) | (r > 1)):
        report.append(Violation(
            ViolationKind.REWARD_RANGE, "reward%s" % list(int(i) for i in idx), f"{r[tuple(idx)]:.12g} is outside [0, 1]"
        ))

    gap = r + r.transpose(2, 3, 0, 1) - 1.0
    for s, a, s_, a_ in np.argwhere(np.abs(gap) > ANTISYMMETRY_TOL):
        # each unordered pair once
        if (s, a) > (s_, a_):
            continue
        report.append(Violation(
            ViolationKind.ANTISYMMETRY, f"({s}, {a}, {s_}, {a_})",
            f"r = {r[s, a, s_, a_]:.12g} and mirrored r = {r[s_, a_, s, a]:.12g} do not sum to 1"
        ))
    return _truncate(report)


def _check_separability(game: PreferenceGame) -> List[Violation]:
    report = []
    owners = {}
    for s1 in game.initial_states:
        s1 = int(s1)
        seen = set().union(*reachable_states(game, s1))
        for s in sorted(seen):
            if s in owners and owners[s] != s1:
                report.append(Violation(
                    ViolationKind.SEPARABILITY, f"state {s}",
                    f"reachable from initial states {owners[s]} and {s1}"
                ))
                continue
            owners[s] = s1
            if game.init_partition[s] != s1:
                report.append(Violation(
                    ViolationKind.PARTITION, f"state {s}",
                    f"labelled with initial state {game.init_partition[s]} but reached from {s1}"
                ))
    return _truncate(report)


def _truncate(report: List[Violation]) -> List[Violation]:
    if len(report) <= MAX_REPORTED:
        return report
    kind = report[0].kind
    return report[:MAX_REPORTED] + [
        Violation(ViolationKind.TRUNCATED, kind, f"{len(report) - MAX_REPORTED} more violations not shown")
    ]
