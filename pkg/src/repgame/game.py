"""Stage-game primitives for two-player repeated normal-form games.

A stage game is a pair of payoff matrices (rows x cols): agent 1 picks the
row, agent 2 picks the column, and each agent receives its own matrix entry.
Payoffs are assumed strictly positive throughout (long-run value ratios are
only meaningful then).

Action indices are 1-based everywhere in the public API, matching the trace
format. Ties in best responses are always broken toward the lowest index;
both agents rely on that shared rule, so it is part of the contract, not a
style choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Absolute tolerance for value comparisons (minimax values, ratios, sums of
# probabilities) and the stricter one for payoff determinism checks.
VALUE_TOL = 1e-9
PAYOFF_TOL = 1e-12

AGENT1 = 1  # row player
AGENT2 = 2  # column player


def _as_matrix(values, rows: int, cols: int, name: str) -> np.ndarray:
    m = np.asarray(values, dtype=np.float64)
    if m.shape != (rows, cols):
        raise ValueError(f"{name}: expected shape {(rows, cols)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name}: entries must be finite reals")
    m = m.copy()
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class StageGame:
    """Immutable bimatrix stage game with strictly positive payoffs."""

    payoff1: np.ndarray
    payoff2: np.ndarray

    def __init__(self, payoff1, payoff2):
        p1 = np.asarray(payoff1, dtype=np.float64)
        if p1.ndim != 2 or p1.size == 0:
            raise ValueError("payoff1 must be a non-empty 2-d array")
        rows, cols = p1.shape
        object.__setattr__(self, "payoff1", _as_matrix(payoff1, rows, cols, "payoff1"))
        object.__setattr__(self, "payoff2", _as_matrix(payoff2, rows, cols, "payoff2"))
        if not (np.all(self.payoff1 > 0) and np.all(self.payoff2 > 0)):
            raise ValueError("stage game payoffs must be strictly positive")

    @property
    def rows(self) -> int:
        return self.payoff1.shape[0]

    @property
    def cols(self) -> int:
        return self.payoff1.shape[1]

    def payoff_matrix(self, agent: int) -> np.ndarray:
        """Payoff matrix of `agent` in global (rows x cols) orientation."""
        if agent == AGENT1:
            return self.payoff1
        if agent == AGENT2:
            return self.payoff2
        raise ValueError(f"agent must be {AGENT1} or {AGENT2}, got {agent}")

    def payoffs(self, row: int, col: int) -> tuple[float, float]:
        """Both payoffs at the 1-based joint action (row, col)."""
        return (
            float(self.payoff1[row - 1, col - 1]),
            float(self.payoff2[row - 1, col - 1]),
        )

    def n_actions(self, agent: int) -> int:
        return self.rows if agent == AGENT1 else self.cols


def validate_mixed(probs, n: int) -> tuple[float, ...]:
    """Check a mixed strategy over n actions: nonnegative, sums to 1 within 1e-9."""
    p = tuple(float(x) for x in probs)
    if len(p) != n:
        raise ValueError(f"mixed strategy has {len(p)} entries, expected {n}")
    if any(x < -VALUE_TOL for x in p):
        raise ValueError(f"mixed strategy has negative entries: {p}")
    if abs(sum(p) - 1.0) > VALUE_TOL:
        raise ValueError(f"mixed strategy sums to {sum(p)}, expected 1")
    return p


def expected_payoff(matrix, mix_row, mix_col) -> float:
    """Expected value of `matrix` under independent row/col mixtures."""
    m = np.asarray(matrix, dtype=np.float64)
    x = np.asarray(validate_mixed(mix_row, m.shape[0]))
    y = np.asarray(validate_mixed(mix_col, m.shape[1]))
    return float(x @ m @ y)


def best_response_pure(matrix, opponent_freq, side: int) -> int:
    """Best pure reply (1-based) to an opponent frequency vector.

    side=1: choose a row of `matrix` against a distribution over columns.
    side=2: choose a column against a distribution over rows.
    Ties break to the lowest index.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if side == AGENT1:
        f = np.asarray(opponent_freq, dtype=np.float64)
        if f.shape != (m.shape[1],):
            raise ValueError("frequency vector does not match column count")
        scores = m @ f
    elif side == AGENT2:
        f = np.asarray(opponent_freq, dtype=np.float64)
        if f.shape != (m.shape[0],):
            raise ValueError("frequency vector does not match row count")
        scores = f @ m
    else:
        raise ValueError(f"side must be 1 or 2, got {side}")
    return int(np.argmax(scores)) + 1  # np.argmax returns the first max


def pure_minimax_value(matrix, deviator: int) -> float:
    """Punishment value restricted to pure punisher actions.

    `matrix` is the deviator's own payoff matrix in global orientation.
    deviator=1: the column player punishes, value = min over cols of col max.
    deviator=2: the row player punishes, value = min over rows of row max.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if deviator == AGENT1:
        return float(np.min(np.max(m, axis=0)))
    if deviator == AGENT2:
        return float(np.min(np.max(m, axis=1)))
    raise ValueError(f"deviator must be 1 or 2, got {deviator}")


@dataclass
class PartialPayoffMatrix:
    """A payoff matrix learned entry by entry, with conflict detection.

    Unknown entries read as NaN in `values`; `known` is the boolean mask.
    """

    rows: int
    cols: int
    values: np.ndarray = field(init=False)
    known: np.ndarray = field(init=False)
    _n_known: int = field(init=False, default=0)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        self.values = np.full((self.rows, self.cols), np.nan)
        self.known = np.zeros((self.rows, self.cols), dtype=bool)

    def reveal(self, row: int, col: int, value: float) -> bool:
        """Record entry (row, col) (1-based). Returns True if it was new.

        Re-revealing a known entry with a different value (beyond 1e-12)
        is a consistency violation and raises.
        """
        r, c = row - 1, col - 1
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ValueError(f"cell ({row}, {col}) outside {self.rows}x{self.cols}")
        if self.known[r, c]:
            if abs(self.values[r, c] - value) > PAYOFF_TOL:
                raise ValueError(
                    f"conflicting reveal at ({row}, {col}): "
                    f"{self.values[r, c]!r} vs {value!r}"
                )
            return False
        self.values[r, c] = value
        self.known[r, c] = True
        self._n_known += 1
        return True

    def is_known(self, row: int, col: int) -> bool:
        return bool(self.known[row - 1, col - 1])

    @property
    def fully_known(self) -> bool:
        return self._n_known == self.rows * self.cols

    @property
    def num_known(self) -> int:
        return self._n_known

    def row_fully_known(self, row: int) -> bool:
        return bool(self.known[row - 1].all())

    def col_fully_known(self, col: int) -> bool:
        return bool(self.known[:, col - 1].all())

    def any_row_fully_known(self) -> bool:
        return bool(self.known.all(axis=1).any())

    def any_col_fully_known(self) -> bool:
        return bool(self.known.all(axis=0).any())

    def zero_fill(self) -> np.ndarray:
        """Copy with unknown entries replaced by 0 (a pessimistic lower bound
        for strictly positive games)."""
        out = np.where(self.known, self.values, 0.0)
        return out

    def exact_values(self) -> np.ndarray:
        if not self.fully_known:
            raise ValueError("matrix is not fully known")
        return self.values.copy()


def check_lemma1_condition(game: StageGame, deviator: int, self_play_value: float) -> bool:
    """True when the pure punishment value against `deviator` does not exceed
    the deviator's self-play value (the sufficient condition for perfect
    rationality of the punishing scheme). Comparison is non-strict within
    tolerance."""
    v = pure_minimax_value(game.payoff_matrix(deviator), deviator)
    return v <= self_play_value + VALUE_TOL


# ---------------------------------------------------------------------------
# Game file format: flat "key = value" text. Payoffs are whitespace-separated
# row-major floats written with repr(), so decimal literals round-trip
# losslessly (repr of a float parses back to the identical float).
# ---------------------------------------------------------------------------


def format_game(game: StageGame) -> str:
    def fmt(m: np.ndarray) -> str:
        return " ".join(repr(float(v)) for v in m.ravel())

    return (
        f"rows = {game.rows}\n"
        f"cols = {game.cols}\n"
        f"payoff1 = {fmt(game.payoff1)}\n"
        f"payoff2 = {fmt(game.payoff2)}\n"
    )


def parse_game(text: str) -> StageGame:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"game file line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in fields:
            raise ValueError(f"game file line {lineno}: duplicate field {key!r}")
        fields[key] = value.strip()
    missing = {"rows", "cols", "payoff1", "payoff2"} - fields.keys()
    if missing:
        raise ValueError(f"game file missing fields: {sorted(missing)}")
    try:
        rows = int(fields["rows"])
        cols = int(fields["cols"])
    except ValueError as e:
        raise ValueError(f"game file: rows/cols must be integers ({e})") from None
    if rows < 1 or cols < 1:
        raise ValueError("game file: rows and cols must be positive")

    def parse_matrix(key: str) -> np.ndarray:
        parts = fields[key].split()
        if len(parts) != rows * cols:
            raise ValueError(
                f"game file: {key} has {len(parts)} entries, expected {rows * cols}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"game file: {key} contains a non-numeric entry") from None
        return np.array(vals).reshape(rows, cols)

    return StageGame(parse_matrix("payoff1"), parse_matrix("payoff2"))


def load_game(path) -> StageGame:
    with open(path, "r", encoding="utf-8") as f:
        return parse_game(f.read())


def save_game(game: StageGame, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_game(game))
