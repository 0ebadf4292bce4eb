"""Per-agent match policies and the engine-facing protocol.

A policy is one side of a repeated game. The engine drives it through:

* ``act() -> int``: choose the next 1-based action.
* ``observe(row, col, own_payoff, opp_payoff)``: digest one completed step
  (``opp_payoff`` is ``None`` under imperfect monitoring).
* ``phase``: label recorded in the trace for this agent's current step.

Two optional fast paths let the engine skip the per-step loop without
changing the realized trace:

* Blocks: ``block_ready()`` returns N > 0 when the policy commits to playing
  the next N steps i.i.d. from ``block_dist()`` regardless of what happens
  inside the block; ``block_sample(n)`` draws them (own RNG), and
  ``observe_block`` digests a block that may be shorter than offered.
* Absorption: ``stationary_candidate()`` returns a mixed strategy, and
  ``certify_stationary(opp_support)`` returns True only when the policy can
  prove it will play that strategy i.i.d. forever provided every future
  opponent action stays inside ``opp_support``. When both policies certify
  against each other's supports, the remainder of the match is a fixed
  product distribution.

Certificates must be sound; the test-suite cross-checks them against plain
step-by-step execution.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .game import AGENT1, AGENT2
from .dynamics import RegretState, rm_distribution, rm_update


def support(probs) -> tuple[int, ...]:
    """1-based indices carrying positive probability."""
    return tuple(i + 1 for i, p in enumerate(probs) if p > 0.0)


def point_mass_action(probs) -> int | None:
    """The 1-based action if `probs` is a point mass, else None."""
    sup = support(probs)
    return sup[0] if len(sup) == 1 else None


def sample_from(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw a 1-based action; point masses consume no randomness."""
    idx = point_mass_action(probs)
    if idx is not None:
        return idx
    cdf = np.cumsum(probs)
    pick = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(pick, len(cdf) - 1) + 1


def sample_block(probs: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    idx = point_mass_action(probs)
    if idx is not None:
        return np.full(n, idx, dtype=np.int64)
    cdf = np.cumsum(probs)
    picks = np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)
    return np.minimum(picks, len(cdf) - 1) + 1


def oriented_matrix(matrix, side: int) -> np.ndarray:
    """Own payoffs as (own actions x opponent actions)."""
    m = np.asarray(matrix, dtype=np.float64)
    if side == AGENT1:
        return m
    if side == AGENT2:
        return m.T
    raise ValueError(f"side must be {AGENT1} or {AGENT2}, got {side}")


class Policy:
    """Base class; subclasses override act/observe and the fast-path hooks."""

    def __init__(self, side: int, label: str):
        if side not in (AGENT1, AGENT2):
            raise ValueError(f"side must be {AGENT1} or {AGENT2}, got {side}")
        self.side = side
        self.label = label

    # -- core protocol ----------------------------------------------------
    @property
    def phase(self) -> str:
        return self.label

    def act(self) -> int:
        raise NotImplementedError

    def observe(self, row: int, col: int, own_payoff: float, opp_payoff: float | None) -> None:
        raise NotImplementedError

    def own_action(self, row: int, col: int) -> int:
        return row if self.side == AGENT1 else col

    def opp_action(self, row: int, col: int) -> int:
        return col if self.side == AGENT1 else row

    # -- block fast path --------------------------------------------------
    def block_ready(self) -> int:
        return 0

    def block_dist(self) -> tuple[float, ...]:
        raise NotImplementedError

    def block_sample(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def observe_block(self, rows, cols, own_payoffs, opp_payoffs) -> None:
        raise NotImplementedError

    # -- absorption fast path ----------------------------------------------
    def stationary_candidate(self) -> tuple[float, ...] | None:
        return None

    def certify_stationary(self, opp_support: tuple[int, ...]) -> bool:
        return False

    def absorbed_sample(self, n: int) -> np.ndarray:
        """Draw the tail of the match from the certified stationary strategy.

        Point masses consume no randomness; mixed candidates sample from the
        policy's own generator (every policy with a mixed candidate holds
        one as `self.rng`).
        """
        cand = np.asarray(self.stationary_candidate(), dtype=np.float64)
        return sample_block(cand, getattr(self, "rng", None), n)


# ---------------------------------------------------------------------------
# Fictitious play (full or sliding window).
# ---------------------------------------------------------------------------


def fp_certificate(
    oriented: np.ndarray,
    best: int,
    opp_support: tuple[int, ...],
    window_contents: tuple[int, ...] | None,
) -> bool:
    """Can a windowed best reply never move off `best` (1-based)?

    With the full history (``window_contents is None``) the score gap of the
    current argmax never shrinks if its per-opponent-action payoff slopes
    dominate on the support, and lowest-index tie-breaking keeps any exact
    tie resolved the same way. With a sliding window the old contents roll
    out, so dominance must hold over the union of the support and the current
    window, strictly against lower-indexed rivals.
    """
    b = best - 1
    n_own = oriented.shape[0]
    if window_contents is None:
        cols = [k - 1 for k in opp_support]
        for a in range(n_own):
            if a == b:
                continue
            if np.any(oriented[b, cols] < oriented[a, cols]):
                return False
        return True
    cols = sorted({k - 1 for k in opp_support} | {k - 1 for k in window_contents})
    for a in range(n_own):
        if a == b:
            continue
        if a < b:
            if np.any(oriented[b, cols] <= oriented[a, cols]):
                return False
        else:
            if np.any(oriented[b, cols] < oriented[a, cols]):
                return False
    return True


class FictitiousPlayPolicy(Policy):
    """Best pure reply to the opponent's (windowed) empirical frequencies.

    Cold start plays action 1. `window=None` is classic fictitious play;
    an integer keeps only the last `window` opponent actions.
    """

    def __init__(self, matrix, side: int, window: int | None = None, label: str | None = None):
        if label is None:
            label = "fp" if window is None else "gfp"
        super().__init__(side, label)
        if window is not None and window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.oriented = oriented_matrix(matrix, side)
        self.window = window
        self.counts = np.zeros(self.oriented.shape[1])
        self.total = 0
        self.recent: deque[int] | None = deque() if window is not None else None

    def act(self) -> int:
        if self.total == 0:
            return 1
        scores = self.oriented @ self.counts
        return int(np.argmax(scores)) + 1

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        opp = self.opp_action(row, col)
        self.counts[opp - 1] += 1
        self.total += 1
        if self.recent is not None:
            self.recent.append(opp)
            if len(self.recent) > self.window:
                old = self.recent.popleft()
                self.counts[old - 1] -= 1
                self.total -= 1

    def stationary_candidate(self):
        if self.total == 0:
            return None
        probs = [0.0] * self.oriented.shape[0]
        probs[self.act() - 1] = 1.0
        return tuple(probs)

    def certify_stationary(self, opp_support) -> bool:
        if self.total == 0:
            return False
        contents = tuple(self.recent) if self.recent is not None else None
        return fp_certificate(self.oriented, self.act(), opp_support, contents)


# ---------------------------------------------------------------------------
# Regret matching.
# ---------------------------------------------------------------------------


class RegretMatchingPolicy(Policy):
    """Sample proportionally to positive cumulative regret (uniform fallback)."""

    def __init__(self, matrix, side: int, rng: np.random.Generator, label: str = "rm"):
        super().__init__(side, label)
        self.oriented = oriented_matrix(matrix, side)
        self.rng = rng
        self.state = RegretState(self.oriented.shape[0])

    def distribution(self) -> np.ndarray:
        return np.asarray(rm_distribution(self.state))

    def act(self) -> int:
        return sample_from(self.distribution(), self.rng)

    def observe(self, row, col, own_payoff, opp_payoff) -> None:
        own = self.own_action(row, col)
        opp = self.opp_action(row, col)
        column = self.oriented[:, opp - 1]
        rm_update(self.state, column - column[own - 1])

    def stationary_candidate(self):
        probs = self.distribution()
        if point_mass_action(probs) is None:
            return None
        return tuple(float(p) for p in probs)

    def certify_stationary(self, opp_support) -> bool:
        probs = self.distribution()
        best = point_mass_action(probs)
        if best is None:
            return False
        # Playing `best` against any action in the support gives every other
        # action a non-positive instantaneous regret, so the (unique) positive
        # cumulative entry stays put and the point mass never moves.
        b = best - 1
        cols = [k - 1 for k in opp_support]
        for a in range(self.oriented.shape[0]):
            if a == b:
                continue
            if np.any(self.oriented[a, cols] > self.oriented[b, cols]):
                return False
        return True
