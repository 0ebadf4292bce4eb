"""Learning-dynamics primitives: history windows, empirical frequencies,
fictitious-play best responses, and regret-matching updates.

These are the stateless building blocks; the stateful per-agent policies
that drive matches live in `policies` and the rational variants in
`rational_fp` / `rational_rm`.

Window convention: `None` means the full history, a positive integer W means
the sliding window over the last min(W, t) entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import AGENT1, AGENT2, best_response_pure


def parse_window(text: str) -> int | None:
    """Parse a window flag value: 'full' or 'sliding:W'."""
    if text == "full":
        return None
    if text.startswith("sliding:"):
        try:
            w = int(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad window spec {text!r}") from None
        if w < 1:
            raise ValueError(f"sliding window must be >= 1, got {w}")
        return w
    raise ValueError(f"bad window spec {text!r}: expected 'full' or 'sliding:W'")


def format_window(window: int | None) -> str:
    return "full" if window is None else f"sliding:{window}"


@dataclass
class History:
    """Time-ordered joint actions (1-based) with both payoffs."""

    joints: list[tuple[int, int]] = field(default_factory=list)
    payoffs: list[tuple[float, float]] = field(default_factory=list)

    def append(self, row: int, col: int, p1: float, p2: float) -> None:
        self.joints.append((row, col))
        self.payoffs.append((p1, p2))

    def actions(self, side: int) -> list[int]:
        i = 0 if side == AGENT1 else 1
        return [j[i] for j in self.joints]

    def __len__(self) -> int:
        return len(self.joints)


def window_slice(seq, window: int | None):
    """The suffix of `seq` selected by the window."""
    if window is None or window >= len(seq):
        return seq
    return seq[len(seq) - window :]


def empirical_frequencies(actions, n_actions: int, window: int | None = None) -> np.ndarray:
    """Relative frequencies of 1-based `actions` over the windowed suffix."""
    part = window_slice(list(actions), window)
    if not part:
        raise ValueError("cannot take frequencies of an empty history")
    counts = np.bincount(np.asarray(part) - 1, minlength=n_actions).astype(np.float64)
    if len(counts) > n_actions:
        raise ValueError("action index outside the declared range")
    return counts / counts.sum()


def gfp_best_response(matrix, opp_actions, side: int, window: int | None = None) -> int:
    """Best pure reply to the opponent's windowed empirical frequencies.

    `matrix` is the actor's own payoff matrix in global (rows x cols)
    orientation; `opp_actions` the opponent's past actions. An empty history
    means a cold start: play action 1 (shared convention, both agents rely
    on it)."""
    if len(opp_actions) == 0:
        return 1
    m = np.asarray(matrix, dtype=np.float64)
    n_opp = m.shape[1] if side == AGENT1 else m.shape[0]
    freq = empirical_frequencies(opp_actions, n_opp, window)
    return best_response_pure(m, freq, side)


def fp_action(matrix, opp_actions, side: int) -> int:
    """Plain fictitious play: full-history best reply (cold start: action 1)."""
    return gfp_best_response(matrix, opp_actions, side, window=None)


# ---------------------------------------------------------------------------
# Regret matching.
# ---------------------------------------------------------------------------


@dataclass
class RegretState:
    """Cumulative instantaneous regrets for one agent.

    The played distribution uses positive parts of the *average* regret;
    averages and cumulative sums have the same sign and proportions, so the
    cumulative vector is what is stored.
    """

    n_actions: int
    cumulative: np.ndarray = field(init=False)
    steps: int = field(init=False, default=0)

    def __post_init__(self):
        if self.n_actions < 1:
            raise ValueError("need at least one action")
        self.cumulative = np.zeros(self.n_actions)


def rm_instantaneous_regret(matrix, own_action: int, opp_action: int, side: int) -> np.ndarray:
    """Regret vector for one step: what each own action would have paid minus
    what the played action paid, against the opponent's realized action.

    `matrix` is the actor's own payoff matrix in global orientation.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if side == AGENT1:
        column = m[:, opp_action - 1]
        return column - column[own_action - 1]
    if side == AGENT2:
        row = m[opp_action - 1, :]
        return row - row[own_action - 1]
    raise ValueError(f"side must be {AGENT1} or {AGENT2}, got {side}")


def rm_update(state: RegretState, regret_vector) -> None:
    v = np.asarray(regret_vector, dtype=np.float64)
    if v.shape != (state.n_actions,):
        raise ValueError("regret vector has the wrong length")
    state.cumulative += v
    state.steps += 1


def rm_bulk_update(state: RegretState, oriented_matrix, joint_counts) -> None:
    """Apply many steps of regret updates at once.

    `oriented_matrix` is (own actions x opponent actions); `joint_counts`
    counts realized joint actions in the same orientation. The summed regret
    is  M @ opp_counts - (total realized payoff) * ones,  which is the
    defined arithmetic for epoch-sized updates (bit-identical no matter how
    the steps were executed).
    """
    m = np.asarray(oriented_matrix, dtype=np.float64)
    counts = np.asarray(joint_counts)
    if counts.shape != m.shape:
        raise ValueError("joint counts shape must match the oriented matrix")
    n = int(counts.sum())
    if n == 0:
        return
    opp_counts = counts.sum(axis=0).astype(np.float64)
    realized = float(np.sum(m * counts))
    state.cumulative += m @ opp_counts - realized
    state.steps += n


def rm_distribution(state: RegretState) -> tuple[float, ...]:
    """Play proportionally to positive average regret; uniform when no
    action has positive regret (including the very first step)."""
    pos = np.clip(state.cumulative, 0.0, None)
    total = float(pos.sum())
    if total <= 0.0:
        n = state.n_actions
        return tuple([1.0 / n] * n)
    return tuple(float(v) for v in pos / total)
