"""Tests for history windows, empirical frequencies, fictitious play, and
regret matching primitives."""

import numpy as np
import pytest

from repgame.dynamics import (
    History,
    RegretState,
    empirical_frequencies,
    format_window,
    fp_action,
    gfp_best_response,
    parse_window,
    rm_bulk_update,
    rm_distribution,
    rm_instantaneous_regret,
    rm_update,
    window_slice,
)


# ---------------------------------------------------------------------------
# Windows and history.
# ---------------------------------------------------------------------------


def test_parse_window_forms():
    assert parse_window("full") is None
    assert parse_window("sliding:25") == 25
    assert format_window(None) == "full"
    assert format_window(7) == "sliding:7"


@pytest.mark.parametrize("bad", ["", "window", "sliding:", "sliding:x", "sliding:0", "sliding:-3"])
def test_parse_window_rejects(bad):
    with pytest.raises(ValueError):
        parse_window(bad)


def test_window_slice():
    seq = [1, 2, 3, 4]
    assert window_slice(seq, None) == [1, 2, 3, 4]
    assert window_slice(seq, 2) == [3, 4]
    assert window_slice(seq, 10) == [1, 2, 3, 4]


def test_history_accumulates():
    h = History()
    h.append(1, 2, 0.5, 1.5)
    h.append(2, 2, 1.0, 2.0)
    assert len(h) == 2
    assert h.actions(1) == [1, 2]
    assert h.actions(2) == [2, 2]
    assert h.payoffs[1] == (1.0, 2.0)


def test_empirical_frequencies_full_and_sliding():
    actions = [1, 1, 2]
    np.testing.assert_allclose(empirical_frequencies(actions, 2), [2 / 3, 1 / 3])
    np.testing.assert_allclose(empirical_frequencies(actions, 2, window=2), [0.5, 0.5])
    # Padding: actions never played still get an entry.
    np.testing.assert_allclose(empirical_frequencies([1], 3), [1.0, 0.0, 0.0])


def test_empirical_frequencies_rejects_empty_and_out_of_range():
    with pytest.raises(ValueError):
        empirical_frequencies([], 2)
    with pytest.raises(ValueError):
        empirical_frequencies([3], 2)
    with pytest.raises(ValueError):
        empirical_frequencies([0], 2)


# ---------------------------------------------------------------------------
# Fictitious play.
# ---------------------------------------------------------------------------


def test_fp_action_example():
    matrix = [[2.0, 0.0], [0.0, 1.0]]
    # Opponent frequencies (0.75, 0.25): row 1 scores 1.5, row 2 scores 0.25.
    assert fp_action(matrix, [1, 1, 1, 2], side=1) == 1


def test_fp_action_cold_start_is_action_one():
    matrix = [[1.0, 5.0], [2.0, 1.0]]
    assert fp_action(matrix, [], side=1) == 1
    assert fp_action(matrix, [], side=2) == 1


def test_fp_lowest_index_tie():
    matrix = [[1.0, 1.0], [1.0, 1.0]]
    assert fp_action(matrix, [2, 1], side=1) == 1
    assert fp_action(matrix, [2, 1], side=2) == 1


def test_gfp_window_changes_the_reply():
    matrix = [[2.0, 0.0], [0.0, 1.0]]
    history = [1, 2, 2, 2]  # full: (1/4, 3/4) -> row 2; last 2: (0, 1) -> row 2
    assert gfp_best_response(matrix, history, side=1) == 2
    assert gfp_best_response(matrix, history, side=1, window=2) == 2
    history2 = [2, 2, 2, 1]  # full: (1/4, 3/4) -> row 2; window 1: (1, 0) -> row 1
    assert gfp_best_response(matrix, history2, side=1) == 2
    assert gfp_best_response(matrix, history2, side=1, window=1) == 1


def test_gfp_side_two_orientation():
    matrix = [[10.0, 4.0, 3.0], [1.0, 60.0, 50.0]]
    # Column scores against row frequencies (1, 0): (10, 4, 3) -> column 1.
    assert gfp_best_response(matrix, [1], side=2) == 1
    # Against (0, 1): (1, 60, 50) -> column 2.
    assert gfp_best_response(matrix, [2], side=2) == 2


def test_fp_self_play_converges_in_cyclic_game():
    # Positive-payoff matching pennies: the time-average play of fictitious
    # play approaches the (0.5, 0.5) equilibrium for both agents.
    r1 = np.array([[2.0, 1.0], [1.0, 2.0]])
    r2 = np.array([[1.0, 2.0], [2.0, 1.0]])
    acts1: list[int] = []
    acts2: list[int] = []
    for _ in range(10_000):
        a1 = fp_action(r1, acts2, side=1)
        a2 = fp_action(r2, acts1, side=2)
        acts1.append(a1)
        acts2.append(a2)
    f1 = empirical_frequencies(acts1, 2)
    f2 = empirical_frequencies(acts2, 2)
    np.testing.assert_allclose(f1, [0.5, 0.5], atol=0.05)
    np.testing.assert_allclose(f2, [0.5, 0.5], atol=0.05)


# ---------------------------------------------------------------------------
# Regret matching.
# ---------------------------------------------------------------------------


def test_instantaneous_regret_column_player():
    matrix = [[3.0, 2.0], [2.0, 5.0]]
    # Column player chose column 1 while the row player played row 1:
    # realized 3, column 2 would have paid 2.
    np.testing.assert_allclose(
        rm_instantaneous_regret(matrix, own_action=1, opp_action=1, side=2), [0.0, -1.0]
    )


def test_instantaneous_regret_row_player():
    matrix = [[25.0, 1.0], [30.0, 5.0]]
    # Row player chose row 1 against column 2: realized 1, row 2 pays 5.
    np.testing.assert_allclose(
        rm_instantaneous_regret(matrix, own_action=1, opp_action=2, side=1), [0.0, 4.0]
    )
    # Played action always has zero regret.
    v = rm_instantaneous_regret(matrix, own_action=2, opp_action=1, side=1)
    assert v[1] == 0.0


def test_rm_distribution_positive_parts():
    state = RegretState(3)
    rm_update(state, [2.0, -1.0, 1.0])
    np.testing.assert_allclose(rm_distribution(state), [2 / 3, 0.0, 1 / 3])


def test_rm_distribution_uniform_fallback():
    state = RegretState(4)
    np.testing.assert_allclose(rm_distribution(state), [0.25] * 4)
    rm_update(state, [-1.0, -2.0, 0.0, -0.5])
    np.testing.assert_allclose(rm_distribution(state), [0.25] * 4)


def test_rm_update_validates_length():
    state = RegretState(2)
    with pytest.raises(ValueError):
        rm_update(state, [1.0, 2.0, 3.0])


def test_bulk_update_matches_per_step_updates():
    rng = np.random.default_rng(7)
    for _ in range(25):
        rows, cols = rng.integers(2, 5), rng.integers(2, 5)
        matrix = rng.uniform(0.5, 10.0, size=(rows, cols))
        n = int(rng.integers(1, 60))
        own = rng.integers(1, rows + 1, size=n)
        opp = rng.integers(1, cols + 1, size=n)

        step_state = RegretState(rows)
        for a, b in zip(own, opp):
            rm_update(step_state, rm_instantaneous_regret(matrix, a, b, side=1))

        bulk_state = RegretState(rows)
        counts = np.zeros((rows, cols), dtype=np.int64)
        np.add.at(counts, (own - 1, opp - 1), 1)
        rm_bulk_update(bulk_state, matrix, counts)

        assert bulk_state.steps == step_state.steps == n
        np.testing.assert_allclose(bulk_state.cumulative, step_state.cumulative, atol=1e-9)


def test_bulk_update_shape_check_and_empty():
    state = RegretState(2)
    with pytest.raises(ValueError):
        rm_bulk_update(state, np.ones((2, 2)), np.zeros((3, 2), dtype=int))
    rm_bulk_update(state, np.ones((2, 2)), np.zeros((2, 2), dtype=int))
    assert state.steps == 0


def test_rm_no_regret_desk_check():
    # Regret matching against an i.i.d. opponent: average positive regret at
    # T = 10^4 sits well under the 2 * max_payoff * sqrt(|A|) / sqrt(T) bound.
    rng = np.random.default_rng(123)
    matrix = np.array([[4.0, 1.0, 2.0], [2.0, 3.0, 1.0], [1.0, 2.0, 4.0]])
    t_max = 10_000
    state = RegretState(3)
    opp_probs = np.array([0.5, 0.3, 0.2])
    for _ in range(t_max):
        probs = np.asarray(rm_distribution(state))
        own = int(np.searchsorted(np.cumsum(probs), rng.random())) + 1
        opp = int(np.searchsorted(np.cumsum(opp_probs), rng.random())) + 1
        rm_update(state, rm_instantaneous_regret(matrix, own, opp, side=1))
    avg_regret = float(np.max(state.cumulative)) / t_max
    bound = 2.0 * matrix.max() * np.sqrt(3) / np.sqrt(t_max)
    assert avg_regret <= bound
