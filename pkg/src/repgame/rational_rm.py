"""Regret matching hardened with exploration, statistical deviation tests,
and minimax punishment.

Play is organized in epochs:

* epoch 1 — both agents play action 1 (one iteration).
* epochs 2..rows*cols (explore, one iteration each) — regret matching on a
  shared probe matrix, evaluated against the previous joint action, walks the
  joint play through the action grid row-major, one cell per epoch, so every
  payoff entry is observed. The probe places a weight `mu` that pulls the
  column player to the next scheduled column and, on row boundaries, a second
  weight `nu` that pulls the row player down to the next row; off-schedule
  joints have zero regret everywhere, so the compliant distribution is always
  a point mass on the scheduled cell.
* epochs rows*cols+1, ... (exploit) — at the start of epoch t the agent
  freezes its regret-matching distribution and samples it i.i.d. for
  ceil(c1 * ln(c2 * t / delta) * t^2) iterations. Under perfect monitoring it
  also freezes the distribution a compliant opponent would play (computable
  because the opponent's matrix was revealed during exploration) and, at the
  end of the epoch, compares it with the opponent's empirical action
  distribution; a Kolmogorov-Smirnov distance above 1/t triggers permanent
  minimax punishment. Cumulative regrets fold in one whole epoch at a time,
  so the arithmetic is identical however the iterations were executed.

Deviations from the exploration schedule are punished immediately under
either monitoring model. Under imperfect monitoring the opponent's payoffs
stay hidden, so the end-of-epoch test is disabled and punishment never
leaves its uniform stage.

With the default constants the false-positive bound of the detection
analysis is not formally guaranteed (that needs 2 >= c2 * t^(2*c1 - 1) for
every epoch t); a `UserWarning` flags this at configuration time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import RegretState, rm_bulk_update, rm_distribution
from .game import AGENT1, PartialPayoffMatrix
from .policies import Policy, oriented_matrix, sample_block, sample_from
from .punish import MinimaxPunisher
from .rational_fp import PERFECT, check_monitoring, exploration_cell, exploration_steps


@dataclass(frozen=True)
class RRmConfig:
    mu: float = 1.0
    nu: float = 1.0
    c1: float = 9.0 / 8.0
    c2: float = 8.0
    delta: float = 0.01

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.nu <= 0.0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.c1 <= 0.0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        if self.c2 <= 1.0:
            raise ValueError(f"c2 must exceed 1, got {self.c2}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if 2.0 * self.c1 - 1.0 > 0.0 or self.c2 > 2.0:
            warnings.warn(
                "detection-error analysis needs 2 >= c2 * t^(2*c1 - 1) for all "
                f"epochs t; c1={self.c1}, c2={self.c2} do not satisfy it, so the "
                "false-positive guarantee is heuristic",
                UserWarning,
                stacklevel=2,
            )


def epoch_length(t: int, cfg: RRmConfig) -> int:
    """Iterations in epoch t (exploitation epochs; exploration uses 1)."""
    if t < 1:
        raise ValueError(f"epoch index must be >= 1, got {t}")
    return math.ceil(cfg.c1 * math.log(cfg.c2 * t / cfg.delta) * t * t)


def epoch_epsilon(t: int) -> float:
    """Detection threshold for the epoch-t deviation test."""
    return 1.0 / t


def exploration_matrix_rrm(t: int, rows: int, cols: int, mu: float, nu: float) -> np.ndarray:
    """Shared probe matrix for exploration epoch t (global orientation).

    Within a row the single weight `mu` sits on the scheduled cell. On a row
    boundary (first column) the previous joint sits at the end of the prior
    row, so the probe instead puts `mu` on that prior row's first column
    (pulling the column player back to column 1) and `nu` on the new row's
    last column (giving the row player positive regret to move down).
    """
    if mu <= 0.0 or nu <= 0.0:
        raise ValueError("probe weights must be positive")
    row, col = exploration_cell(t, rows, cols)
    probe = np.zeros((rows, cols))
    if col == 1:
        probe[max(1, row - 1) - 1, 0] = mu
        probe[row - 1, cols - 1] = nu
    else:
        probe[row - 1, col - 1] = mu
    return probe


def exploration_regret_distribution(probe: np.ndarray, prev_joint: tuple[int, int], side: int) -> np.ndarray:
    """Single-iteration regret matching on the probe versus the previous joint.

    With no positive regret the distribution falls back to a point mass on
    the agent's own previous action.
    """
    oriented = oriented_matrix(probe, side)
    prev_own = prev_joint[0] if side == AGENT1 else prev_joint[1]
    prev_opp = prev_joint[1] if side == AGENT1 else prev_joint[0]
    column = oriented[:, prev_opp - 1]
    delta = column - column[prev_own - 1]
    pos = np.clip(delta, 0.0, None)
    total = pos.sum()
    if total <= 0.0:
        out = np.zeros(len(column))
        out[prev_own - 1] = 1.0
        return out
    return pos / total


class RationalRegretMatching(Policy):
    def __init__(
        self,
        rows: int,
        cols: int,
        side: int,
        rng: np.random.Generator,
        cfg: RRmConfig | None = None,
        monitoring: str = PERFECT,
    ):
        super().__init__(side, "rrm")
        if rows < 1 or cols < 1:
            raise ValueError("need at least one action per side")
        self.rows = rows
        self.cols = cols
        self.rng = rng
        self.cfg = cfg if cfg is not None else RRmConfig()
        self.monitoring = check_monitoring(monitoring)

        self.n_own = rows if side == AGENT1 else cols
        self.n_opp = cols if side == AGENT1 else rows
        self.epoch = 1
        self.iters_left = 1
        self._phase = "explore"
        self.own_partial = PartialPayoffMatrix(rows, cols)
        self.opp_partial = PartialPayoffMatrix(rows, cols)
        self.prev_joint: tuple[int, int] | None = None
        self.regret_self = RegretState(self.n_own)
        self.regret_opp = RegretState(self.n_opp)
        self.phi_self: np.ndarray | None = None
        self.phi_opp: np.ndarray | None = None
        self.epoch_counts: np.ndarray | None = None
        self.own_oriented: np.ndarray | None = None
        self.opp_oriented: np.ndarray | None = None
        self.punisher: MinimaxPunisher | None = None

    @property
    def phase(self) -> str:
        return self._phase

    # -- acting --------------------------------------------------------------
    def act(self) -> int:
        if self._phase == "punish":
            return self.punisher.act()
        if self._phase == "explore":
            if self.epoch == 1:
                return 1
            probe = exploration_matrix_rrm(self.epoch, self.rows, self.cols, self.cfg.mu, self.cfg.nu)
            return sample_from(exploration_regret_distribution(probe, self.prev_joint, self.side), self.rng)
        return sample_from(self.phi_self, self.rng)

    # -- observing -----------------------------------------------------------
    def _start_punishment(self) -> None:
        self._phase = "punish"
        self.punisher = MinimaxPunisher(
            self.opp_partial, self.side, self.rng, reveals_possible=self.monitoring == PERFECT
        )

    def _freeze_epoch(self) -> None:
        self.phi_self = np.asarray(rm_distribution(self.regret_self))
        if self.monitoring == PERFECT:
            self.phi_opp = np.asarray(rm_distribution(self.regret_opp))
        self.iters_left = epoch_length(self.epoch, self.cfg)
        self.epoch_counts = np.zeros((self.n_own, self.n_opp), dtype=np.int64)

    def _begin_exploitation(self) -> None:
        own = self.own_partial.exact_values()
        self.own_oriented = oriented_matrix(own, self.side)
        if self.monitoring == PERFECT:
            opp = self.opp_partial.exact_values()
            self.opp_oriented = oriented_matrix(opp, 3 - self.side)
        self._phase = "exploit"
        self._freeze_epoch()

    def _end_exploit_epoch(self) -> None:
        counts = self.epoch_counts
        n = int(counts.sum())
        if self.phi_opp is not None:
            empirical = counts.sum(axis=0).astype(np.float64) / n
            stat = float(np.max(np.abs(np.cumsum(empirical) - np.cumsum(self.phi_opp))))
            if stat > epoch_epsilon(self.epoch):
                self._start_punishment()
                return
        rm_bulk_update(self.regret_self, self.own_oriented, counts)
        if self.opp_oriented is not None:
            rm_bulk_update(self.regret_opp, self.opp_oriented, counts.T)
        self.epoch += 1
        self._freeze_epoch()

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        if self._phase != "exploit":
            self.own_partial.reveal(row, col, own_payoff)
            if opp_payoff is not None:
                self.opp_partial.reveal(row, col, opp_payoff)
        if self._phase == "punish":
            return
        if self._phase == "explore":
            if (row, col) != exploration_cell(self.epoch, self.rows, self.cols):
                self._start_punishment()
                return
            self.prev_joint = (row, col)
            self.epoch += 1
            if self.epoch > exploration_steps(self.rows, self.cols):
                self._begin_exploitation()
            return
        own = self.own_action(row, col)
        opp = self.opp_action(row, col)
        self.epoch_counts[own - 1, opp - 1] += 1
        self.iters_left -= 1
        if self.iters_left == 0:
            self._end_exploit_epoch()

    # -- block fast path -------------------------------------------------------
    def block_ready(self) -> int:
        return self.iters_left if self._phase == "exploit" else 0

    def block_dist(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.phi_self)

    def block_sample(self, n: int) -> np.ndarray:
        return sample_block(self.phi_self, self.rng, n)

    def observe_block(self, rows, cols, own_payoffs, opp_payoffs) -> None:
        n = len(rows)
        own = rows if self.side == AGENT1 else cols
        opp = cols if self.side == AGENT1 else rows
        np.add.at(self.epoch_counts, (own - 1, opp - 1), 1)
        self.iters_left -= n
        if self.iters_left == 0:
            self._end_exploit_epoch()

    # -- absorption --------------------------------------------------------------
    def stationary_candidate(self):
        if self._phase == "punish":
            return self.punisher.stationary_candidate()
        return None

    def certify_stationary(self, opp_support) -> bool:
        if self._phase == "punish":
            return self.punisher.certify_stationary(opp_support)
        return False
