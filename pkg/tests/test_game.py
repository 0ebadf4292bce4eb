"""Stage-game primitives: payoffs, best responses, partial matrices, file I/O."""

import numpy as np
import pytest

from repgame.game import (
    AGENT1,
    AGENT2,
    PartialPayoffMatrix,
    StageGame,
    best_response_pure,
    check_lemma1_condition,
    expected_payoff,
    format_game,
    parse_game,
    pure_minimax_value,
    validate_mixed,
)


def test_stage_game_basic():
    g = StageGame([[10, 4, 3], [2, 1, 6]], [[10, 4, 3], [1, 60, 50]])
    assert g.rows == 2 and g.cols == 3
    assert g.payoffs(1, 1) == (10.0, 10.0)
    assert g.payoffs(2, 3) == (6.0, 50.0)
    assert g.n_actions(AGENT1) == 2 and g.n_actions(AGENT2) == 3
    assert g.payoff_matrix(AGENT2)[1, 1] == 60.0


def test_stage_game_rejects_bad_input():
    with pytest.raises(ValueError):
        StageGame([[1, 2], [3, 0]], [[1, 2], [3, 4]])  # zero payoff
    with pytest.raises(ValueError):
        StageGame([[1, 2], [3, -1]], [[1, 2], [3, 4]])  # negative payoff
    with pytest.raises(ValueError):
        StageGame([[1, 2], [3, 4]], [[1, 2, 3], [4, 5, 6]])  # shape mismatch
    with pytest.raises(ValueError):
        StageGame([[1, np.inf], [3, 4]], [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        StageGame([[]], [[]])


def test_stage_game_is_immutable():
    g = StageGame([[1, 2], [3, 4]], [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        g.payoff1[0, 0] = 99.0


def test_validate_mixed():
    assert validate_mixed([0.25, 0.75], 2) == (0.25, 0.75)
    validate_mixed([0.5, 0.5 + 5e-10], 2)  # within tolerance
    with pytest.raises(ValueError):
        validate_mixed([0.5, 0.6], 2)
    with pytest.raises(ValueError):
        validate_mixed([-0.1, 1.1], 2)
    with pytest.raises(ValueError):
        validate_mixed([1.0], 2)


def test_expected_payoff_hand_values():
    m = [[2, 0], [0, 1]]
    assert expected_payoff(m, [0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.75)
    assert expected_payoff(m, [1, 0], [0, 1]) == 0.0
    assert expected_payoff(m, [0, 1], [0, 1]) == 1.0


def test_expected_payoff_matches_einsum_on_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(50):
        r, c = rng.integers(1, 5, size=2)
        m = rng.uniform(-5, 5, size=(r, c))
        x = rng.dirichlet(np.ones(r))
        y = rng.dirichlet(np.ones(c))
        want = float(np.einsum("i,ij,j->", x, m, y))
        assert expected_payoff(m, x, y) == pytest.approx(want, abs=1e-12)


def test_best_response_pure_examples():
    m = [[2, 0], [0, 1]]
    assert best_response_pure(m, [0.75, 0.25], side=AGENT1) == 1
    assert best_response_pure(m, [0.25, 0.75], side=AGENT1) == 2
    # Column side: choose a column against a row distribution.
    m2 = [[10, 4, 3], [1, 60, 50]]
    assert best_response_pure(m2, [1.0, 0.0], side=AGENT2) == 1
    assert best_response_pure(m2, [0.0, 1.0], side=AGENT2) == 2
    assert best_response_pure(m2, [0.5, 0.5], side=AGENT2) == 2


def test_best_response_ties_break_to_lowest_index():
    flat = [[1, 1], [1, 1]]
    assert best_response_pure(flat, [0.5, 0.5], side=AGENT1) == 1
    assert best_response_pure(flat, [0.5, 0.5], side=AGENT2) == 1
    m = [[3, 0], [3, 0]]  # both rows identical
    assert best_response_pure(m, [1.0, 0.0], side=AGENT1) == 1


def test_pure_minimax_hand_values():
    assert pure_minimax_value([[10, 4, 3], [2, 1, 6]], deviator=AGENT1) == 4.0
    assert pure_minimax_value([[1, -1], [-1, 1]], deviator=AGENT1) == 1.0
    # Punishing the column player: min over rows of the row max.
    assert pure_minimax_value([[10, 4, 3], [1, 60, 50]], deviator=AGENT2) == 10.0
    assert pure_minimax_value([[25, 1], [30, 5]], deviator=AGENT1) == 5.0


def test_partial_matrix_reveal_and_queries():
    p = PartialPayoffMatrix(2, 3)
    assert not p.fully_known and p.num_known == 0
    assert p.reveal(1, 1, 10.0) is True
    assert p.reveal(1, 1, 10.0) is False  # duplicate, consistent
    assert p.is_known(1, 1) and not p.is_known(2, 1)
    with pytest.raises(ValueError):
        p.reveal(1, 1, 10.5)  # conflicting value
    with pytest.raises(ValueError):
        p.reveal(3, 1, 1.0)  # out of range
    p.reveal(1, 2, 4.0)
    p.reveal(1, 3, 3.0)
    assert p.row_fully_known(1) and p.any_row_fully_known()
    assert not p.col_fully_known(1) and not p.any_col_fully_known()
    for c, v in [(1, 1.0), (2, 60.0), (3, 50.0)]:
        p.reveal(2, c, v)
    assert p.fully_known and p.num_known == 6
    np.testing.assert_array_equal(
        p.exact_values(), [[10, 4, 3], [1, 60, 50]]
    )


def test_partial_matrix_zero_fill():
    p = PartialPayoffMatrix(2, 2)
    p.reveal(1, 1, 7.0)
    p.reveal(2, 2, 3.0)
    np.testing.assert_array_equal(p.zero_fill(), [[7, 0], [0, 3]])
    with pytest.raises(ValueError):
        p.exact_values()


def test_zero_fill_minimax_monotone_on_random_masks():
    # Zero-filling unknown entries of a nonnegative matrix can only lower the
    # pure punishment value, for either deviator.
    rng = np.random.default_rng(123)
    for _ in range(200):
        r = int(rng.integers(1, 5))
        c = int(rng.integers(1, 5))
        m = rng.uniform(0, 10, size=(r, c))
        p = PartialPayoffMatrix(r, c)
        full_row = int(rng.integers(1, r + 1))
        for j in range(1, r + 1):
            for k in range(1, c + 1):
                if j == full_row or rng.random() < 0.5:
                    p.reveal(j, k, m[j - 1, k - 1])
        zf = p.zero_fill()
        for dev in (AGENT1, AGENT2):
            assert pure_minimax_value(zf, dev) <= pure_minimax_value(m, dev) + 1e-12


def test_check_lemma1_condition():
    g = StageGame([[10, 4, 3], [2, 1, 6]], [[10, 4, 3], [1, 60, 50]])
    # Punishment value against agent 2 is exactly its self-play value of 10:
    # the non-strict comparison must hold.
    assert check_lemma1_condition(g, AGENT2, 10.0)
    assert not check_lemma1_condition(g, AGENT2, 9.5)
    assert check_lemma1_condition(g, AGENT1, 4.0)  # pure value is 4


def test_game_file_round_trip_is_lossless():
    vals1 = [[np.pi, 1 / 3], [1.0000000000000002, 123456789.12345679]]
    vals2 = [[2.718281828459045, 7e-12], [3.0, 10 / 7]]
    g = StageGame(vals1, vals2)
    g2 = parse_game(format_game(g))
    # Bit-exact equality, not approximate: repr round-trips floats.
    assert g2.payoff1.tolist() == g.payoff1.tolist()
    assert g2.payoff2.tolist() == g.payoff2.tolist()


def test_game_file_parse_accepts_comments_and_blank_lines():
    text = (
        "# a 2x2 game\n\nrows = 2\ncols = 2\n"
        "payoff1 = 1 2 3 4\n"
        "payoff2 = 5 6 7 8\n"
    )
    g = parse_game(text)
    assert g.payoffs(2, 1) == (3.0, 7.0)


@pytest.mark.parametrize(
    "text",
    [
        "rows = 2\ncols = 2\npayoff1 = 1 2 3 4\n",  # missing payoff2
        "rows = 2\ncols = 2\npayoff1 = 1 2 3\npayoff2 = 1 2 3 4\n",  # wrong count
        "rows = two\ncols = 2\npayoff1 = 1 2 3 4\npayoff2 = 1 2 3 4\n",
        "rows = 2\ncols = 2\npayoff1 = 1 x 3 4\npayoff2 = 1 2 3 4\n",
        "rows = 2\ncols = 2\nrows = 2\npayoff1 = 1 2 3 4\npayoff2 = 1 2 3 4\n",
        "rows = 0\ncols = 2\npayoff1 =\npayoff2 =\n",
        "just some text\n",
    ],
)
def test_game_file_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_game(text)
