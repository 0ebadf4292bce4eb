"""Windowed fictitious play hardened with exploration, deviation detection,
and minimax punishment.

The policy starts with no payoff knowledge at all. Play proceeds in phases:

* explore — both agents sweep the joint-action grid row-major, one cell per
  step, so every payoff entry of both matrices is observed exactly once.
  The sweep is realized by best-responding to a shared probe matrix that
  places a single positive entry on the scheduled cell; with lowest-index
  tie-breaking this reproduces the schedule exactly for both sides.
* exploit — windowed fictitious play on the now fully-known own matrix,
  seeded with the exploration history.
* punish — entered as soon as the opponent leaves the script: during
  exploration, any joint action off the scheduled cell; during exploitation
  (perfect monitoring only), any opponent action that differs from the best
  response a compliant twin would have computed from our own action history.
  Punishment is minimax-based and permanent.

Under imperfect monitoring the opponent's payoffs are never observed, so the
exploitation-phase detector is disabled and punishment can never leave its
uniform stage; the exploration schedule check remains in force.
"""

from __future__ import annotations

import math

import numpy as np

from .game import AGENT1, PartialPayoffMatrix
from .policies import FictitiousPlayPolicy, Policy, oriented_matrix
from .punish import MinimaxPunisher

PERFECT = "perfect"
IMPERFECT = "imperfect"


def check_monitoring(monitoring: str) -> str:
    if monitoring not in (PERFECT, IMPERFECT):
        raise ValueError(f"monitoring must be '{PERFECT}' or '{IMPERFECT}', got {monitoring!r}")
    return monitoring


def exploration_steps(rows: int, cols: int) -> int:
    return rows * cols


def exploration_cell(t: int, rows: int, cols: int) -> tuple[int, int]:
    """Scheduled joint action at exploration step t (1-based, row-major)."""
    if not 1 <= t <= rows * cols:
        raise ValueError(f"exploration step {t} outside 1..{rows * cols}")
    q = math.ceil(t / cols)
    return q, t - (q - 1) * cols


def exploration_matrix_rgfp(t: int, rows: int, cols: int, mu: float) -> np.ndarray:
    """Probe matrix for step t: zeros except `mu` on the scheduled cell."""
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    probe = np.zeros((rows, cols))
    row, col = exploration_cell(t, rows, cols)
    probe[row - 1, col - 1] = mu
    return probe


class RationalFictitiousPlay(Policy):
    def __init__(
        self,
        rows: int,
        cols: int,
        side: int,
        rng: np.random.Generator,
        window: int | None = None,
        monitoring: str = PERFECT,
        mu: float = 1.0,
    ):
        super().__init__(side, "rgfp")
        if rows < 1 or cols < 1:
            raise ValueError("need at least one action per side")
        if window is not None and window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if mu <= 0.0:
            raise ValueError(f"mu must be positive, got {mu}")
        self.rows = rows
        self.cols = cols
        self.rng = rng
        self.window = window
        self.monitoring = check_monitoring(monitoring)
        self.mu = mu

        self.t = 0
        self._phase = "explore"
        self.own_partial = PartialPayoffMatrix(rows, cols)
        self.opp_partial = PartialPayoffMatrix(rows, cols)
        self.n_opp = cols if side == AGENT1 else rows
        self.explore_counts = np.zeros(self.n_opp)
        self.explore_history: list[tuple[int, int]] = []
        self.own_fp: FictitiousPlayPolicy | None = None
        self.opp_fp: FictitiousPlayPolicy | None = None
        self.punisher: MinimaxPunisher | None = None

    @property
    def phase(self) -> str:
        return self._phase

    # -- acting -------------------------------------------------------------
    def _explore_action(self) -> int:
        if self.t == 0:
            return 1
        probe = exploration_matrix_rgfp(self.t + 1, self.rows, self.cols, self.mu)
        scores = oriented_matrix(probe, self.side) @ (self.explore_counts / self.t)
        return int(np.argmax(scores)) + 1

    def act(self) -> int:
        if self._phase == "punish":
            return self.punisher.act()
        if self._phase == "explore":
            return self._explore_action()
        return self.own_fp.act()

    # -- observing ----------------------------------------------------------
    def _start_punishment(self) -> None:
        self._phase = "punish"
        self.punisher = MinimaxPunisher(
            self.opp_partial, self.side, self.rng, reveals_possible=self.monitoring == PERFECT
        )

    def _finish_exploration(self) -> None:
        own = self.own_partial.exact_values()
        self.own_fp = FictitiousPlayPolicy(own, self.side, self.window)
        for row, col in self.explore_history:
            self.own_fp.observe(row, col, 0.0, None)
        if self.monitoring == PERFECT:
            opp = self.opp_partial.exact_values()
            self.opp_fp = FictitiousPlayPolicy(opp, 3 - self.side, self.window)
            for row, col in self.explore_history:
                self.opp_fp.observe(row, col, 0.0, None)
        self._phase = "exploit"

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        self.t += 1
        self.own_partial.reveal(row, col, own_payoff)
        if opp_payoff is not None:
            self.opp_partial.reveal(row, col, opp_payoff)

        if self._phase == "punish":
            return

        if self._phase == "explore":
            self.explore_counts[self.opp_action(row, col) - 1] += 1
            self.explore_history.append((row, col))
            if (row, col) != exploration_cell(self.t, self.rows, self.cols):
                self._start_punishment()
                return
            if self.t == exploration_steps(self.rows, self.cols):
                self._finish_exploration()
            return

        # Exploit: predict what a compliant opponent would play from our own
        # action history *before* folding in this step.
        predicted = self.opp_fp.act() if self.opp_fp is not None else None
        self.own_fp.observe(row, col, 0.0, None)
        if self.opp_fp is not None:
            self.opp_fp.observe(row, col, 0.0, None)
        if predicted is not None and self.opp_action(row, col) != predicted:
            self._start_punishment()

    # -- absorption ----------------------------------------------------------
    def stationary_candidate(self):
        if self._phase == "exploit":
            return self.own_fp.stationary_candidate()
        if self._phase == "punish":
            return self.punisher.stationary_candidate()
        return None

    def certify_stationary(self, opp_support) -> bool:
        if self._phase == "punish":
            return self.punisher.certify_stationary(opp_support)
        if self._phase != "exploit":
            return False
        if not self.own_fp.certify_stationary(opp_support):
            return False
        if self.opp_fp is None:
            return True
        # The detector must stay quiet: the opponent may only ever play the
        # single action our compliant twin predicts, and that prediction must
        # itself be frozen under our own (point) future play.
        predicted = self.opp_fp.act()
        if tuple(opp_support) != (predicted,):
            return False
        own_action = self.own_fp.act()
        return self.opp_fp.certify_stationary((own_action,))
