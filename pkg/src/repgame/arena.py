"""Match engine, trace capture, value estimation, and the rationality-ratio
measurement harness.

The engine runs a two-policy match over a fixed horizon and records the full
step-level trace. Three execution paths produce identical results:

* step-by-step — always available;
* blocks — when both policies commit to i.i.d. play for the next N steps
  (`block_ready`), the engine samples and applies whole blocks at once;
* absorption — when both policies *certify* that their strategies can never
  change again given the other's support (`certify_stationary`), the rest of
  the match is filled by sampling the certified product distribution.

Randomness: each agent owns a Philox generator keyed by (match seed, agent
index), so a match is a pure function of its configuration, and the same
seed list reused across runs keeps the paired-comparison noise down.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .adversaries import BestResponseExploiter, ConstantAction, DeviationWindow, StationaryMixed
from .game import AGENT1, AGENT2, StageGame
from .policies import FictitiousPlayPolicy, Policy, RegretMatchingPolicy, support
from .rational_fp import IMPERFECT, PERFECT, RationalFictitiousPlay, check_monitoring
from .rational_rm import RationalRegretMatching, RRmConfig

DEFAULT_HORIZON = 100_000
DEFAULT_NUM_SEEDS = 50
TRACE_HEADER = "t,row,col,payoff1,payoff2,phase1,phase2,u1_avg,u2_avg"

_ABSORPTION_CHECK_EVERY = 16


def agent_rng(seed: int, agent: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=np.array([seed, agent], dtype=np.uint64)))


# ---------------------------------------------------------------------------
# Policy specifications (picklable match ingredients).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolicySpec:
    """What to build on one side of a match: a kind plus parameters.

    Kinds: fp | gfp | rm | rgfp | rrm | constant | mixed | br_exploiter |
    deviation_window. Window-aware kinds take their window from the match
    configuration unless the spec carries its own.
    """

    kind: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))


def fp_spec() -> PolicySpec:
    return PolicySpec("fp")


def gfp_spec(window: int | None = None) -> PolicySpec:
    return PolicySpec("gfp", {"window": window} if window is not None else {})


def rm_spec() -> PolicySpec:
    return PolicySpec("rm")


def rgfp_spec(mu: float = 1.0, window: int | None = None) -> PolicySpec:
    params: dict = {"mu": mu}
    if window is not None:
        params["window"] = window
    return PolicySpec("rgfp", params)


def rrm_spec(cfg: RRmConfig | None = None) -> PolicySpec:
    return PolicySpec("rrm", {"cfg": cfg} if cfg is not None else {})


def constant_spec(action: int) -> PolicySpec:
    return PolicySpec("constant", {"action": action})


def mixed_spec(probs) -> PolicySpec:
    return PolicySpec("mixed", {"probs": tuple(float(p) for p in probs)})


def br_exploiter_spec() -> PolicySpec:
    return PolicySpec("br_exploiter")


def deviation_window_spec(compliant: PolicySpec, deviant: PolicySpec, start: int, end: int | None = None) -> PolicySpec:
    return PolicySpec(
        "deviation_window", {"compliant": compliant, "deviant": deviant, "start": start, "end": end}
    )


def build_policy(
    spec: PolicySpec,
    side: int,
    game: StageGame,
    monitoring: str,
    window: int | None,
    rng: np.random.Generator,
) -> Policy:
    kind = spec.kind
    params = spec.params
    n_own = game.rows if side == AGENT1 else game.cols
    own_matrix = game.payoff_matrix(side)
    eff_window = params.get("window", window)
    if kind == "fp":
        return FictitiousPlayPolicy(own_matrix, side, None)
    if kind == "gfp":
        return FictitiousPlayPolicy(own_matrix, side, eff_window)
    if kind == "rm":
        return RegretMatchingPolicy(own_matrix, side, rng)
    if kind == "rgfp":
        return RationalFictitiousPlay(
            game.rows, game.cols, side, rng, eff_window, monitoring, params.get("mu", 1.0)
        )
    if kind == "rrm":
        return RationalRegretMatching(
            game.rows, game.cols, side, rng, params.get("cfg"), monitoring
        )
    if kind == "constant":
        return ConstantAction(params["action"], n_own, side)
    if kind == "mixed":
        return StationaryMixed(params["probs"], side, rng)
    if kind == "br_exploiter":
        return BestResponseExploiter(game, side)
    if kind == "deviation_window":
        compliant = build_policy(params["compliant"], side, game, monitoring, window, rng)
        deviant = build_policy(params["deviant"], side, game, monitoring, window, rng)
        return DeviationWindow(compliant, deviant, params["start"], params.get("end"))
    raise ValueError(f"unknown policy kind {kind!r}")


# ---------------------------------------------------------------------------
# Match configuration and trace.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchConfig:
    game: StageGame
    spec1: PolicySpec
    spec2: PolicySpec
    horizon: int = DEFAULT_HORIZON
    seed: int = 0
    monitoring: str = PERFECT
    window: int | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        check_monitoring(self.monitoring)
        if self.window is not None and self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


@dataclass
class MatchTrace:
    horizon: int
    seed: int
    monitoring: str
    rows: np.ndarray
    cols: np.ndarray
    payoff1: np.ndarray
    payoff2: np.ndarray
    phase1_codes: np.ndarray
    phase2_codes: np.ndarray
    phase_labels: tuple[str, ...]
    u1_avg: np.ndarray
    u2_avg: np.ndarray

    def payoffs(self, agent: int) -> np.ndarray:
        return self.payoff1 if agent == AGENT1 else self.payoff2

    def running_average(self, agent: int) -> np.ndarray:
        return self.u1_avg if agent == AGENT1 else self.u2_avg

    def phases(self, agent: int) -> np.ndarray:
        codes = self.phase1_codes if agent == AGENT1 else self.phase2_codes
        return np.asarray(self.phase_labels, dtype=object)[codes]

    def tail_length(self) -> int:
        return max(1, self.horizon // 10)

    def tail_mean(self, agent: int) -> float:
        return float(self.payoffs(agent)[-self.tail_length() :].mean())

    def mean(self, agent: int) -> float:
        return float(self.payoffs(agent).mean())


def run_match(config: MatchConfig) -> MatchTrace:
    game = config.game
    t_max = config.horizon
    perfect = config.monitoring == PERFECT
    pol1 = build_policy(config.spec1, AGENT1, game, config.monitoring, config.window, agent_rng(config.seed, 1))
    pol2 = build_policy(config.spec2, AGENT2, game, config.monitoring, config.window, agent_rng(config.seed, 2))
    pay1 = game.payoff_matrix(AGENT1)
    pay2 = game.payoff_matrix(AGENT2)

    rows = np.empty(t_max, dtype=np.int64)
    cols = np.empty(t_max, dtype=np.int64)
    out1 = np.empty(t_max, dtype=np.float64)
    out2 = np.empty(t_max, dtype=np.float64)
    ph1 = np.empty(t_max, dtype=np.uint8)
    ph2 = np.empty(t_max, dtype=np.uint8)
    labels: list[str] = []
    codes: dict[str, int] = {}

    def code_of(label: str) -> int:
        got = codes.get(label)
        if got is None:
            got = len(labels)
            codes[label] = got
            labels.append(label)
        return got

    def fill(start: int, a1s: np.ndarray, a2s: np.ndarray, c1: int, c2: int) -> None:
        stop = start + len(a1s)
        rows[start:stop] = a1s
        cols[start:stop] = a2s
        out1[start:stop] = pay1[a1s - 1, a2s - 1]
        out2[start:stop] = pay2[a1s - 1, a2s - 1]
        ph1[start:stop] = c1
        ph2[start:stop] = c2

    t = 0
    next_check = 0
    while t < t_max:
        b1, b2 = pol1.block_ready(), pol2.block_ready()
        if b1 > 0 and b2 > 0:
            n = min(b1, b2, t_max - t)
            c1, c2 = code_of(pol1.phase), code_of(pol2.phase)
            a1s = pol1.block_sample(n)
            a2s = pol2.block_sample(n)
            fill(t, a1s, a2s, c1, c2)
            p1s, p2s = out1[t : t + n], out2[t : t + n]
            pol1.observe_block(a1s, a2s, p1s, p2s if perfect else None)
            pol2.observe_block(a1s, a2s, p2s, p1s if perfect else None)
            t += n
            next_check = t
            continue
        if t >= next_check:
            cand1, cand2 = pol1.stationary_candidate(), pol2.stationary_candidate()
            if (
                cand1 is not None
                and cand2 is not None
                and pol1.certify_stationary(support(cand2))
                and pol2.certify_stationary(support(cand1))
            ):
                n = t_max - t
                c1, c2 = code_of(pol1.phase), code_of(pol2.phase)
                fill(t, pol1.absorbed_sample(n), pol2.absorbed_sample(n), c1, c2)
                t = t_max
                break
            next_check = t + _ABSORPTION_CHECK_EVERY
        c1, c2 = code_of(pol1.phase), code_of(pol2.phase)
        a1, a2 = pol1.act(), pol2.act()
        p1, p2 = float(pay1[a1 - 1, a2 - 1]), float(pay2[a1 - 1, a2 - 1])
        rows[t], cols[t] = a1, a2
        out1[t], out2[t] = p1, p2
        ph1[t], ph2[t] = c1, c2
        pol1.observe(a1, a2, p1, p2 if perfect else None)
        pol2.observe(a1, a2, p2, p1 if perfect else None)
        t += 1

    steps = np.arange(1, t_max + 1, dtype=np.float64)
    return MatchTrace(
        horizon=t_max,
        seed=config.seed,
        monitoring=config.monitoring,
        rows=rows,
        cols=cols,
        payoff1=out1,
        payoff2=out2,
        phase1_codes=ph1,
        phase2_codes=ph2,
        phase_labels=tuple(labels),
        u1_avg=np.cumsum(out1) / steps,
        u2_avg=np.cumsum(out2) / steps,
    )


def write_trace_csv(trace: MatchTrace, path: str) -> None:
    """Write the step-level trace; floats keep full round-trip precision.

    The file is written atomically (temporary file + rename)."""
    phases1 = trace.phases(AGENT1).tolist()
    phases2 = trace.phases(AGENT2).tolist()
    rows = trace.rows.tolist()
    cols = trace.cols.tolist()
    pay1 = trace.payoff1.tolist()
    pay2 = trace.payoff2.tolist()
    avg1 = trace.u1_avg.tolist()
    avg2 = trace.u2_avg.tolist()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(TRACE_HEADER + "\n")
            for i in range(trace.horizon):
                handle.write(
                    f"{i + 1},{rows[i]},{cols[i]},{pay1[i]!r},{pay2[i]!r},"
                    f"{phases1[i]},{phases2[i]},{avg1[i]!r},{avg2[i]!r}\n"
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Value estimation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueEstimate:
    """Tail-mean payoff (the value proxy) aggregated across seeds."""

    value: float
    std_err: float
    full_mean: float
    num_seeds: int
    horizon: int


def _aggregate(tails: list[float], fulls: list[float], horizon: int) -> ValueEstimate:
    tails_arr = np.asarray(tails)
    n = len(tails_arr)
    std_err = float(tails_arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ValueEstimate(
        value=float(tails_arr.mean()),
        std_err=std_err,
        full_mean=float(np.mean(fulls)),
        num_seeds=n,
        horizon=horizon,
    )


def estimate_value(traces: list[MatchTrace], agent: int) -> ValueEstimate:
    if not traces:
        raise ValueError("need at least one trace")
    return _aggregate(
        [tr.tail_mean(agent) for tr in traces],
        [tr.mean(agent) for tr in traces],
        traces[0].horizon,
    )


def _match_stats(config: MatchConfig, agent: int) -> tuple[float, float]:
    trace = run_match(config)
    return trace.tail_mean(agent), trace.mean(agent)


def _run_stats(configs: list[MatchConfig], agent: int, jobs: int) -> tuple[list[float], list[float]]:
    if jobs > 1 and len(configs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_match_stats, configs, [agent] * len(configs)))
    else:
        results = [_match_stats(cfg, agent) for cfg in configs]
    tails = [r[0] for r in results]
    fulls = [r[1] for r in results]
    return tails, fulls


# ---------------------------------------------------------------------------
# Rationality ratio.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioResult:
    ratio: float
    ratio_stderr: float
    u_self: ValueEstimate
    u_dev: ValueEstimate
    horizon: int
    seeds: tuple[int, ...]
    deviator: int


def seed_list(num_seeds: int, base_seed: int = 0) -> list[int]:
    if num_seeds < 1:
        raise ValueError(f"need at least one seed, got {num_seeds}")
    return list(range(base_seed, base_seed + num_seeds))


def rationality_ratio(
    game: StageGame,
    algo: PolicySpec,
    adversary: PolicySpec,
    deviator: int,
    horizon: int = DEFAULT_HORIZON,
    seeds: list[int] | None = None,
    monitoring: str = PERFECT,
    window: int | None = None,
    jobs: int = 1,
) -> RatioResult:
    """How much a deviator gains by replacing the algorithm on its side.

    Numerator: the deviator agent's value when it plays `adversary` while the
    other side runs `algo`. Denominator: the same agent's value when both
    sides run `algo`. The same seed list drives both sets of matches.
    """
    if deviator not in (AGENT1, AGENT2):
        raise ValueError(f"deviator must be {AGENT1} or {AGENT2}, got {deviator}")
    if seeds is None:
        seeds = seed_list(DEFAULT_NUM_SEEDS)
    if not seeds:
        raise ValueError("seed list must not be empty")

    def cfg(spec1: PolicySpec, spec2: PolicySpec, seed: int) -> MatchConfig:
        return MatchConfig(game, spec1, spec2, horizon, seed, monitoring, window)

    self_cfgs = [cfg(algo, algo, s) for s in seeds]
    if deviator == AGENT2:
        dev_cfgs = [cfg(algo, adversary, s) for s in seeds]
    else:
        dev_cfgs = [cfg(adversary, algo, s) for s in seeds]

    tails_self, fulls_self = _run_stats(self_cfgs, deviator, jobs)
    tails_dev, fulls_dev = _run_stats(dev_cfgs, deviator, jobs)
    u_self = _aggregate(tails_self, fulls_self, horizon)
    u_dev = _aggregate(tails_dev, fulls_dev, horizon)

    if u_self.value <= 0.0:
        raise RuntimeError(
            f"self-play value {u_self.value} is not positive; the ratio is undefined"
        )
    ratio = u_dev.value / u_self.value
    rel_sq = 0.0
    if u_dev.value != 0.0:
        rel_sq += (u_dev.std_err / u_dev.value) ** 2
    rel_sq += (u_self.std_err / u_self.value) ** 2
    ratio_stderr = abs(ratio) * math.sqrt(rel_sq)
    return RatioResult(ratio, ratio_stderr, u_self, u_dev, horizon, tuple(seeds), deviator)


@dataclass(frozen=True)
class WorstCaseReport:
    worst_ratio: float
    worst_name: str
    results: Mapping  # name -> RatioResult


def worst_case_ratio(
    game: StageGame,
    algo: PolicySpec,
    adversaries: list[tuple[str, PolicySpec, int]],
    horizon: int = DEFAULT_HORIZON,
    seeds: list[int] | None = None,
    monitoring: str = PERFECT,
    window: int | None = None,
    jobs: int = 1,
) -> WorstCaseReport:
    """Max rationality ratio over a named adversary suite."""
    if not adversaries:
        raise ValueError("need at least one adversary")
    results = {}
    for name, spec, deviator in adversaries:
        results[name] = rationality_ratio(
            game, algo, spec, deviator, horizon, seeds, monitoring, window, jobs
        )
    worst_name = max(results, key=lambda k: results[k].ratio)
    return WorstCaseReport(results[worst_name].ratio, worst_name, results)


# ---------------------------------------------------------------------------
# Named games.
# ---------------------------------------------------------------------------


def make_thm1_game(c: float = 4.0) -> StageGame:
    """2x3 game whose self-play lock-in pays agent 2 exactly 10 while an
    unpunished constant deviation to column 3 pays 10*(c+1)."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    r1 = [[10.0, 4.0, 3.0], [2.0, 1.0, 6.0]]
    r2 = [[10.0, 4.0, 3.0], [1.0, 10.0 * (c + 1.0) + 10.0, 10.0 * (c + 1.0)]]
    return StageGame(r1, r2)


def make_thm2_game(c: float = 4.0) -> StageGame:
    """2x2 game with a strictly dominant row-2: regret matching locks (2,2)
    paying agent 1 exactly 5, while an unpunished constant deviation to row 1
    pays 5*(c+1)."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    r1 = [[5.0 * (c + 1.0), 1.0], [30.0, 5.0]]
    r2 = [[3.0, 2.0], [2.0, 5.0]]
    return StageGame(r1, r2)


def make_imperfect_pair(c: float = 4.0) -> tuple[StageGame, StageGame]:
    """Two games identical for agent 1 and differing only in agent 2's payoffs.

    In the second game, column 1 strictly dominates for agent 2, so compliant
    self-play locks (1,1) paying agent 2 exactly 10; a constant column-2
    deviation is worth 10*(c+1) per step if the opponent merely best-responds
    instead of punishing. Under imperfect monitoring an agent cannot tell the
    two games apart from its own payoffs alone.
    """
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    r1 = [[5.0, 1.0], [2.0, 4.0]]
    g1 = StageGame(r1, [[1.0, 6.0], [2.0, 7.0]])
    g2 = StageGame(r1, [[10.0, 1.0], [10.0 * (c + 1.0) + 10.0, 10.0 * (c + 1.0)]])
    return g1, g2


def random_game(rows: int, cols: int, seed: int, lo: float = 0.5, hi: float = 10.0) -> StageGame:
    if lo <= 0 or hi <= lo:
        raise ValueError("need 0 < lo < hi")
    rng = np.random.default_rng(seed)
    return StageGame(rng.uniform(lo, hi, (rows, cols)), rng.uniform(lo, hi, (rows, cols)))


def summary_line(name: str, result: RatioResult) -> str:
    return (
        f"{name}: ratio={result.ratio:.4f} (stderr {result.ratio_stderr:.4f}), "
        f"u_dev={result.u_dev.value:.4f}, u_self={result.u_self.value:.4f}, "
        f"T={result.horizon}, seeds={len(result.seeds)}"
    )
