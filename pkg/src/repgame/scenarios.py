"""Named end-to-end experiment scenarios.

Each scenario runs a fixed experiment design on a named game, writes
step-level trace CSVs (and a summary.json) into an output directory, and
returns a JSON-ready summary whose top-level keys always include:
scenario, ratio, ratio_stderr, u_self, u_dev, T, seeds.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass

from .arena import (
    DEFAULT_HORIZON,
    DEFAULT_NUM_SEEDS,
    MatchConfig,
    PolicySpec,
    RatioResult,
    constant_spec,
    deviation_window_spec,
    fp_spec,
    gfp_spec,
    make_imperfect_pair,
    make_thm1_game,
    make_thm2_game,
    rationality_ratio,
    rgfp_spec,
    rm_spec,
    rrm_spec,
    run_match,
    seed_list,
    write_trace_csv,
)
from .dynamics import format_window
from .rational_fp import IMPERFECT, PERFECT
from .rational_rm import RRmConfig


@dataclass(frozen=True)
class ScenarioOptions:
    out: str
    horizon: int = DEFAULT_HORIZON
    num_seeds: int = DEFAULT_NUM_SEEDS
    base_seed: int = 0
    c: float = 4.0
    window: int | None = None
    monitoring: str = PERFECT
    mu: float = 1.0
    nu: float = 1.0
    c1: float = 9.0 / 8.0
    c2: float = 8.0
    delta: float = 0.01
    jobs: int = 1

    def seeds(self) -> list[int]:
        return seed_list(self.num_seeds, self.base_seed)

    def rrm_config(self) -> RRmConfig:
        return RRmConfig(self.mu, self.nu, self.c1, self.c2, self.delta)


def _summary(name: str, res: RatioResult, opts: ScenarioOptions, **extra) -> dict:
    out = {
        "scenario": name,
        "ratio": res.ratio,
        "ratio_stderr": res.ratio_stderr,
        "u_self": asdict(res.u_self),
        "u_dev": asdict(res.u_dev),
        "T": res.horizon,
        "seeds": list(res.seeds),
        "deviator": res.deviator,
        "monitoring": opts.monitoring,
        "window": format_window(opts.window),
    }
    out.update(extra)
    return out


def _write_traces(name: str, conditions: dict[str, MatchConfig], opts: ScenarioOptions) -> dict[str, str]:
    files = {}
    for condition, config in conditions.items():
        filename = f"{name.replace('-', '_')}_{condition}.csv"
        write_trace_csv(run_match(config), os.path.join(opts.out, filename))
        files[condition] = filename
    return files


def _ratio(game, algo, adversary, deviator, opts: ScenarioOptions, monitoring=None) -> RatioResult:
    return rationality_ratio(
        game,
        algo,
        adversary,
        deviator,
        opts.horizon,
        opts.seeds(),
        monitoring if monitoring is not None else opts.monitoring,
        opts.window,
        opts.jobs,
    )


# ---------------------------------------------------------------------------
# Baseline-exploitation scenarios.
# ---------------------------------------------------------------------------


def scenario_thm1_fp_exploit(opts: ScenarioOptions) -> dict:
    """Plain fictitious play is exploitable: a constant column-3 deviator
    multiplies its value by c+1 relative to self-play."""
    game = make_thm1_game(opts.c)
    res = _ratio(game, fp_spec(), constant_spec(3), 2, opts)
    seed = opts.base_seed
    files = _write_traces(
        "thm1-fp-exploit",
        {
            "selfplay": MatchConfig(game, fp_spec(), fp_spec(), opts.horizon, seed, opts.monitoring, opts.window),
            "deviation": MatchConfig(game, fp_spec(), constant_spec(3), opts.horizon, seed, opts.monitoring, opts.window),
        },
        opts,
    )
    return _summary("thm1-fp-exploit", res, opts, files=files)


def scenario_thm2_rm_exploit(opts: ScenarioOptions) -> dict:
    """Plain regret matching is exploitable by a constant row-1 deviator."""
    game = make_thm2_game(opts.c)
    res = _ratio(game, rm_spec(), constant_spec(1), 1, opts)
    seed = opts.base_seed
    files = _write_traces(
        "thm2-rm-exploit",
        {
            "selfplay": MatchConfig(game, rm_spec(), rm_spec(), opts.horizon, seed, opts.monitoring, opts.window),
            "deviation": MatchConfig(game, constant_spec(1), rm_spec(), opts.horizon, seed, opts.monitoring, opts.window),
        },
        opts,
    )
    return _summary("thm2-rm-exploit", res, opts, files=files)


# ---------------------------------------------------------------------------
# Rational-algorithm scenarios.
# ---------------------------------------------------------------------------


def _rational_scenario(
    name: str,
    game,
    algo: PolicySpec,
    baseline: PolicySpec,
    deviant: PolicySpec,
    deviator: int,
    exploit_start: int,
    opts: ScenarioOptions,
) -> dict:
    """Shared design: an unpunished baseline ratio, plus deviations against
    the hardened algorithm starting at exploration and at exploitation."""
    dev_explore = deviant
    dev_exploit = deviation_window_spec(algo, deviant, exploit_start)
    res_baseline = _ratio(game, baseline, deviant, deviator, opts)
    res_explore = _ratio(game, algo, dev_explore, deviator, opts)
    res_exploit = _ratio(game, algo, dev_exploit, deviator, opts)
    headline = res_exploit if res_exploit.ratio >= res_explore.ratio else res_explore

    seed = opts.base_seed

    def cfg(spec_dev: PolicySpec, spec_algo: PolicySpec) -> MatchConfig:
        spec1, spec2 = (spec_dev, spec_algo) if deviator == 1 else (spec_algo, spec_dev)
        return MatchConfig(game, spec1, spec2, opts.horizon, seed, opts.monitoring, opts.window)

    files = _write_traces(
        name,
        {
            "selfplay": cfg(algo, algo),
            "dev_baseline": cfg(deviant, baseline),
            "dev_explore": cfg(dev_explore, algo),
            "dev_exploit": cfg(dev_exploit, algo),
        },
        opts,
    )
    return _summary(
        name,
        headline,
        opts,
        files=files,
        conditions={
            "baseline_unpunished": res_baseline.ratio,
            "dev_explore": res_explore.ratio,
            "dev_exploit": res_exploit.ratio,
        },
    )


def scenario_rgfp_rational(opts: ScenarioOptions) -> dict:
    game = make_thm1_game(opts.c)
    return _rational_scenario(
        "rgfp-rational",
        game,
        rgfp_spec(mu=opts.mu),
        gfp_spec(),
        constant_spec(3),
        deviator=2,
        exploit_start=game.rows * game.cols + 1,
        opts=opts,
    )


def scenario_rrm_rational(opts: ScenarioOptions) -> dict:
    game = make_thm2_game(opts.c)
    return _rational_scenario(
        "rrm-rational",
        game,
        rrm_spec(opts.rrm_config()),
        rm_spec(),
        constant_spec(1),
        deviator=1,
        exploit_start=game.rows * game.cols + 1,
        opts=opts,
    )


# ---------------------------------------------------------------------------
# Monitoring-contrast scenario.
# ---------------------------------------------------------------------------


def scenario_imperfect_negative(opts: ScenarioOptions) -> dict:
    """With opponent payoffs hidden, deviations during exploitation go
    undetected and the deviation gain survives; perfect monitoring removes it.

    The deviation starts at the first exploitation step: schedule breaks
    during exploration are caught from joint actions alone, so an immediate
    constant deviator would be punished under either monitoring mode.
    """
    _, game = make_imperfect_pair(opts.c)
    algo = rgfp_spec(mu=opts.mu)
    exploit_start = game.rows * game.cols + 1
    deviant = deviation_window_spec(algo, constant_spec(2), exploit_start)
    res_perfect = _ratio(game, algo, deviant, 2, opts, monitoring=PERFECT)
    res_imperfect = _ratio(game, algo, deviant, 2, opts, monitoring=IMPERFECT)
    seed = opts.base_seed
    files = _write_traces(
        "imperfect-negative",
        {
            "perfect": MatchConfig(game, algo, deviant, opts.horizon, seed, PERFECT, opts.window),
            "imperfect": MatchConfig(game, algo, deviant, opts.horizon, seed, IMPERFECT, opts.window),
        },
        opts,
    )
    summary = _summary("imperfect-negative", res_imperfect, opts, files=files)
    summary["monitoring"] = IMPERFECT
    summary["conditions"] = {
        "ratio_perfect": res_perfect.ratio,
        "ratio_imperfect": res_imperfect.ratio,
    }
    return summary


# ---------------------------------------------------------------------------
# Curve-structure scenarios (plot inputs).
# ---------------------------------------------------------------------------


def _structure_scenario(
    name: str,
    game,
    algo: PolicySpec,
    deviant: PolicySpec,
    deviator: int,
    exploit_start: int,
    opts: ScenarioOptions,
) -> dict:
    seed = opts.base_seed

    def cfg(spec1: PolicySpec, spec2: PolicySpec) -> MatchConfig:
        return MatchConfig(game, spec1, spec2, opts.horizon, seed, opts.monitoring, opts.window)

    dev_exploit = deviation_window_spec(algo, deviant, exploit_start)
    if deviator == 1:
        conditions = {
            "selfplay": cfg(algo, algo),
            "dev_explore": cfg(deviant, algo),
            "dev_exploit": cfg(dev_exploit, algo),
        }
    else:
        conditions = {
            "selfplay": cfg(algo, algo),
            "dev_explore": cfg(algo, deviant),
            "dev_exploit": cfg(algo, dev_exploit),
        }
    traces = {cond: run_match(c) for cond, c in conditions.items()}
    files = {}
    for cond, trace in traces.items():
        filename = f"{name.replace('-', '_')}_{cond}.csv"
        write_trace_csv(trace, os.path.join(opts.out, filename))
        files[cond] = filename

    tails = {cond: trace.tail_mean(deviator) for cond, trace in traces.items()}
    res = _ratio(game, algo, dev_exploit, deviator, opts)
    return _summary(
        name,
        res,
        opts,
        files=files,
        conditions={
            "tail_values": tails,
            "selfplay_dominates_dev_exploit": tails["selfplay"] >= tails["dev_exploit"],
            "selfplay_dominates_dev_explore": tails["selfplay"] >= tails["dev_explore"],
        },
    )


def scenario_fig5_structure(opts: ScenarioOptions) -> dict:
    game = make_thm1_game(opts.c)
    return _structure_scenario(
        "fig5-structure",
        game,
        rgfp_spec(mu=opts.mu),
        constant_spec(3),
        deviator=2,
        exploit_start=game.rows * game.cols + 1,
        opts=opts,
    )


def scenario_fig7_structure(opts: ScenarioOptions) -> dict:
    game = make_thm2_game(opts.c)
    return _structure_scenario(
        "fig7-structure",
        game,
        rrm_spec(opts.rrm_config()),
        constant_spec(1),
        deviator=1,
        exploit_start=game.rows * game.cols + 1,
        opts=opts,
    )


SCENARIOS = {
    "thm1-fp-exploit": scenario_thm1_fp_exploit,
    "thm2-rm-exploit": scenario_thm2_rm_exploit,
    "rgfp-rational": scenario_rgfp_rational,
    "rrm-rational": scenario_rrm_rational,
    "imperfect-negative": scenario_imperfect_negative,
    "fig5-structure": scenario_fig5_structure,
    "fig7-structure": scenario_fig7_structure,
}


def run_scenario(name: str, opts: ScenarioOptions) -> dict:
    if name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise ValueError(f"unknown scenario {name!r}; available: {known}")
    os.makedirs(opts.out, exist_ok=True)
    summary = SCENARIOS[name](opts)
    with open(os.path.join(opts.out, "summary.json"), "w") as handle:
        json.dump(summary, handle, indent=2)
        handle.write("\n")
    return summary
