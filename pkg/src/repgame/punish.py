"""Absorbing punishment: hold a detected deviator to its minimax value.

The punisher works from its running (possibly partial) knowledge of the
deviator's payoff matrix, which the owning policy keeps revealing into a
shared `PartialPayoffMatrix`:

* while no full line of that matrix along the deviator's own-action axis is
  known, play uniformly (there is not yet a usable estimate of what the
  deviator can guarantee against any reply);
* once at least one such line is known, play the mixed minimax strategy of
  the zero-filled estimate — missing entries count as 0, below any true
  payoff, so the estimate can only understate what punishment must cover;
* once the matrix is fully known, play the exact mixed minimax strategy.

The stage is re-evaluated whenever the number of known entries grows, and
punishment never ends.
"""

from __future__ import annotations

import numpy as np

from .game import AGENT1, PartialPayoffMatrix
from .minimax import mixed_minimax
from .policies import point_mass_action, sample_block, sample_from


class MinimaxPunisher:
    def __init__(
        self,
        deviator_matrix: PartialPayoffMatrix,
        punisher_side: int,
        rng: np.random.Generator,
        reveals_possible: bool,
    ):
        self.matrix = deviator_matrix
        self.punisher_side = punisher_side
        self.deviator_side = 3 - punisher_side
        self.rng = rng
        self.reveals_possible = reveals_possible
        self.n_own = deviator_matrix.rows if punisher_side == AGENT1 else deviator_matrix.cols
        self._cached_known = -1
        self._strategy = np.full(self.n_own, 1.0 / self.n_own)

    def _gate_open(self) -> bool:
        # A full line along the deviator's own-action axis: a row of the
        # matrix when the deviator picks rows, a column when it picks columns.
        if self.deviator_side == AGENT1:
            return self.matrix.any_row_fully_known()
        return self.matrix.any_col_fully_known()

    def strategy(self) -> np.ndarray:
        if self.matrix.num_known != self._cached_known:
            self._cached_known = self.matrix.num_known
            if self.matrix.fully_known:
                _, mix = mixed_minimax(self.matrix.exact_values(), self.deviator_side)
                self._strategy = np.asarray(mix)
            elif self._gate_open():
                _, mix = mixed_minimax(self.matrix.zero_fill(), self.deviator_side)
                self._strategy = np.asarray(mix)
            else:
                self._strategy = np.full(self.n_own, 1.0 / self.n_own)
        return self._strategy

    def act(self) -> int:
        return sample_from(self.strategy(), self.rng)

    def sample(self, n: int) -> np.ndarray:
        return sample_block(self.strategy(), self.rng, n)

    # -- absorption ---------------------------------------------------------
    def stationary_candidate(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.strategy())

    def certify_stationary(self, opp_support) -> bool:
        """Stationary iff no future reveal can change the stage or strategy.

        Without reveals (imperfect monitoring) knowledge is frozen. With
        reveals, it suffices that every cell the remaining play can reach —
        own support crossed with the opponent's support — is already known.
        """
        if not self.reveals_possible:
            return True
        strat = self.strategy()
        for i in range(self.n_own):
            if strat[i] <= 0.0:
                continue
            for s in opp_support:
                row, col = (i + 1, s) if self.punisher_side == AGENT1 else (s, i + 1)
                if not self.matrix.is_known(row, col):
                    return False
        return True
