"""Mixed minimax (punishment) values via a dense exact-rational simplex.

The punishment value against a deviator is the least payoff the other agent
can hold the deviator to: value = min over punisher mixtures of the
deviator's best reply. The strategy returned is always the *punisher's*
mixture (a column mix when punishing agent 1, a row mix when punishing
agent 2).

Solved as the classic zero-sum LP. After shifting the matrix so every entry
is >= 1, the minimizing player's problem

    max 1'w   s.t.  Q w <= 1,  w >= 0        (w = z / value)

has the all-slack basis feasible, so a plain phase-2 tableau suffices; the
shift moves the value by exactly the shift amount and leaves the optimal
mixtures unchanged. The tableau is kept in exact rational arithmetic
(float inputs convert exactly), so Bland's rule needs no tolerances, the
duality certificate is checked as an identity, and symmetric games come out
at their exact value (e.g. matching pennies at 0, not at rounding noise).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .game import AGENT1, AGENT2

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _simplex_max(A: list[list[Fraction]], m: int, n: int):
    """Maximize sum(x) subject to A x <= 1, x >= 0 (A is m x n, entries >= 1).

    Exact rational tableau with Bland's rule. Returns (x, duals, objective):
    x the primal solution (length n), duals the prices of the m rows.
    """
    width = n + m + 1
    T = [row[:] + [_ZERO] * m + [_ONE] for row in A]
    for i in range(m):
        T[i][n + i] = _ONE
    obj = [-_ONE] * n + [_ZERO] * m + [_ZERO]  # z_j - c_j with c = 1 on x
    basis = list(range(n, n + m))

    max_iters = 50 * width
    for _ in range(max_iters):
        enter = next((j for j in range(n + m) if obj[j] < 0), -1)
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise RuntimeError(
                f"simplex: unbounded objective at entering column {enter}"
            )
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        prow = T[leave]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [v - f * p for v, p in zip(T[i], prow)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [v - f * p for v, p in zip(obj, prow)]
        basis[leave] = enter
    else:
        raise RuntimeError(f"simplex: no convergence after {max_iters} pivots")

    x = [_ZERO] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = T[i][-1]
    duals = obj[n : n + m]
    return x, duals, obj[-1]


def _normalize(mix: list[Fraction]) -> list[Fraction]:
    s = sum(mix)
    if s <= 0:
        raise RuntimeError("solver produced an all-zero mixture")
    return [v / s for v in mix]


def _zero_sum_solve(matrix):
    """Exact value and optimal mixtures of the zero-sum game where the row
    player maximizes `matrix` and the column player minimizes it.

    Returns (value, row_mix, col_mix) as Fractions.
    """
    Q = np.asarray(matrix, dtype=np.float64)
    if Q.ndim != 2 or Q.size == 0:
        raise ValueError("matrix must be a non-empty 2-d array")
    if not np.all(np.isfinite(Q)):
        raise ValueError("matrix entries must be finite reals")
    rows = [[Fraction(float(v)) for v in r] for r in Q]
    lo = min(min(r) for r in rows)
    shift = _ZERO if lo >= 1 else _ONE - lo  # pre-shift: entries >= 1
    A = [[v + shift for v in r] for r in rows]

    m, n = len(A), len(A[0])
    w, duals, obj = _simplex_max(A, m, n)
    if obj <= 0:
        raise RuntimeError(f"simplex returned non-positive objective {obj}")
    value = 1 / obj
    col_mix = _normalize(w)
    row_mix = _normalize(duals)

    # Duality certificate, exact: the column mix caps every pure reply at the
    # value; the row mix guarantees it against every pure column.
    upper = max(sum(a * z for a, z in zip(r, col_mix)) for r in A)
    lower = min(
        sum(A[i][k] * row_mix[i] for i in range(m)) for k in range(n)
    )
    if not (lower == value == upper):
        raise RuntimeError(
            "simplex solution failed its duality certificate: "
            f"value={value}, cap of col mix={upper}, guarantee of row mix={lower}"
        )
    return value - shift, row_mix, col_mix


def mixed_minimax(matrix, deviator: int) -> tuple[float, tuple[float, ...]]:
    """Punishment value and the punisher's optimal mixture.

    `matrix` is the deviator's own payoff matrix in global (rows x cols)
    orientation. deviator=1: agent 2 punishes by mixing columns.
    deviator=2: agent 1 punishes by mixing rows (the matrix is transposed
    internally so the deviator is always the maximizing row player).
    """
    Q = np.asarray(matrix, dtype=np.float64)
    if deviator == AGENT1:
        value, _, punisher = _zero_sum_solve(Q)
    elif deviator == AGENT2:
        value, _, punisher = _zero_sum_solve(Q.T)
    else:
        raise ValueError(f"deviator must be {AGENT1} or {AGENT2}, got {deviator}")
    return float(value), tuple(float(v) for v in punisher)
