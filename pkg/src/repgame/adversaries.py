"""Adversary policies for probing a learning algorithm's exploitability."""

from __future__ import annotations

import numpy as np

from .game import AGENT1, AGENT2, StageGame, validate_mixed
from .policies import Policy, sample_block, sample_from

BIG_BLOCK = 1 << 30


class ConstantAction(Policy):
    """Plays one fixed action forever."""

    def __init__(self, action: int, n_own: int, side: int):
        super().__init__(side, "constant")
        if not 1 <= action <= n_own:
            raise ValueError(f"action {action} outside 1..{n_own}")
        self.action = action
        self.n_own = n_own

    def act(self) -> int:
        return self.action

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        pass

    def block_ready(self) -> int:
        return BIG_BLOCK

    def block_dist(self):
        probs = [0.0] * self.n_own
        probs[self.action - 1] = 1.0
        return tuple(probs)

    def block_sample(self, n: int) -> np.ndarray:
        return np.full(n, self.action, dtype=np.int64)

    def observe_block(self, rows, cols, own_payoffs, opp_payoffs) -> None:
        pass

    def stationary_candidate(self):
        return self.block_dist()

    def certify_stationary(self, opp_support) -> bool:
        return True


class StationaryMixed(Policy):
    """Samples every step i.i.d. from a fixed mixed strategy."""

    def __init__(self, probs, side: int, rng: np.random.Generator):
        super().__init__(side, "mixed")
        self.probs = np.asarray(validate_mixed(probs, len(probs)))
        self.rng = rng

    def act(self) -> int:
        return sample_from(self.probs, self.rng)

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        pass

    def block_ready(self) -> int:
        return BIG_BLOCK

    def block_dist(self):
        return tuple(float(p) for p in self.probs)

    def block_sample(self, n: int) -> np.ndarray:
        return sample_block(self.probs, self.rng, n)

    def observe_block(self, rows, cols, own_payoffs, opp_payoffs) -> None:
        pass

    def stationary_candidate(self):
        return self.block_dist()

    def certify_stationary(self, opp_support) -> bool:
        return True


def best_constant_exploit(game: StageGame, side: int) -> int:
    """The constant action maximizing own payoff once a myopic learner best
    responds to it (lowest index on ties, both for the learner's reply and
    the final choice)."""
    r1 = game.payoff_matrix(AGENT1)
    r2 = game.payoff_matrix(AGENT2)
    if side == AGENT2:
        replies = np.argmax(r1, axis=0)  # learner picks a row per column
        values = r2[replies, np.arange(game.cols)]
    elif side == AGENT1:
        replies = np.argmax(r2, axis=1)  # learner picks a column per row
        values = r1[np.arange(game.rows), replies]
    else:
        raise ValueError(f"side must be {AGENT1} or {AGENT2}, got {side}")
    return int(np.argmax(values)) + 1


class BestResponseExploiter(ConstantAction):
    """Commits to the most profitable constant action against a learner that
    settles on the best response to it."""

    def __init__(self, game: StageGame, side: int):
        n_own = game.rows if side == AGENT1 else game.cols
        super().__init__(best_constant_exploit(game, side), n_own, side)
        self.label = "br"


class DeviationWindow(Policy):
    """Behaves like `compliant` outside [start, end] and like `deviant`
    inside it (1-based step indices; `end=None` means forever).

    Both sub-policies observe every step so that a finite window hands play
    back to a fully synchronized compliant policy (best suited to stateless
    or baseline compliants: a self-monitoring compliant would see its own
    in-window actions as deviations). With an infinite window the compliant
    policy is dropped at the switch, and the fast-path hooks delegate to the
    deviant; finite windows run strictly step by step.
    """

    def __init__(self, compliant: Policy, deviant: Policy, start: int, end: int | None = None):
        if compliant.side != deviant.side:
            raise ValueError("sub-policies must play the same side")
        if start < 1:
            raise ValueError(f"start must be >= 1, got {start}")
        if end is not None and end < start:
            raise ValueError(f"end {end} precedes start {start}")
        super().__init__(compliant.side, "window")
        self.compliant: Policy | None = compliant
        self.deviant = deviant
        self.start = start
        self.end = end
        self.t = 0

    def _inside(self, step: int) -> bool:
        return step >= self.start and (self.end is None or step <= self.end)

    def _regime(self, step: int) -> Policy:
        return self.deviant if self._inside(step) else self.compliant

    @property
    def phase(self) -> str:
        return self._regime(self.t + 1).phase

    def act(self) -> int:
        return self._regime(self.t + 1).act()

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        self.t += 1
        if self.compliant is not None:
            self.compliant.observe(row, col, own_payoff, opp_payoff)
            if self.end is None and self.t >= self.start:
                self.compliant = None
        self.deviant.observe(row, col, own_payoff, opp_payoff)

    def _tail_policy(self) -> Policy | None:
        """The policy that plays the rest of the match, if decided."""
        if self.end is None and self.t + 1 >= self.start:
            return self.deviant
        return None

    def block_ready(self) -> int:
        tail = self._tail_policy()
        return tail.block_ready() if tail is not None else 0

    def block_dist(self):
        return self._tail_policy().block_dist()

    def block_sample(self, n: int) -> np.ndarray:
        return self._tail_policy().block_sample(n)

    def observe_block(self, rows, cols, own_payoffs, opp_payoffs) -> None:
        self.t += len(rows)
        self._tail_policy().observe_block(rows, cols, own_payoffs, opp_payoffs)

    def stationary_candidate(self):
        tail = self._tail_policy()
        return tail.stationary_candidate() if tail is not None else None

    def certify_stationary(self, opp_support) -> bool:
        tail = self._tail_policy()
        return tail.certify_stationary(opp_support) if tail is not None else False

    def absorbed_sample(self, n: int) -> np.ndarray:
        return self._tail_policy().absorbed_sample(n)
