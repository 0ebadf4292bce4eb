"""Command-line interface.

Subcommands:
  run       play one match and print tail/full values (optionally a trace CSV)
  ratio     estimate a deviation ratio over many seeds
  scenario  run a named experiment design and write its CSVs + summary.json

Games come from --preset (thm1 | thm2 | imperfect1 | imperfect2 |
random:RxC:SEED) or --game FILE. Policies are compact strings:

  fp | gfp | rm | rgfp | rrm | br_exploiter
  constant:A                  always play action A (1-based)
  mixed:p1,p2,...             stationary mixture over own actions
  deviate(COMPLIANT; DEVIANT; START[; END])
                              play COMPLIANT, switch to DEVIANT on step START
                              (and back after END, if given)

A --config FILE holds `key = value` lines using the long option names with
hyphens replaced by underscores (e.g. `horizon = 5000`). Values given on the
command line take precedence over the config file.

Exit codes: 0 success, 2 bad usage/configuration, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .arena import (
    DEFAULT_HORIZON,
    DEFAULT_NUM_SEEDS,
    MatchConfig,
    PolicySpec,
    br_exploiter_spec,
    constant_spec,
    deviation_window_spec,
    fp_spec,
    gfp_spec,
    make_imperfect_pair,
    make_thm1_game,
    make_thm2_game,
    mixed_spec,
    random_game,
    rationality_ratio,
    rgfp_spec,
    rm_spec,
    rrm_spec,
    run_match,
    seed_list,
    write_trace_csv,
)
from .dynamics import format_window, parse_window
from .game import StageGame, load_game
from .rational_fp import IMPERFECT, PERFECT
from .rational_rm import RRmConfig
from .scenarios import SCENARIOS, ScenarioOptions, run_scenario


class UsageError(ValueError):
    """Bad command line, config file, game file, or policy string."""


# ---------------------------------------------------------------------------
# Policy strings.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolicyParams:
    """Algorithm knobs shared by every policy string on the command line."""

    mu: float = 1.0
    nu: float = 1.0
    c1: float = 9.0 / 8.0
    c2: float = 8.0
    delta: float = 0.01

    def rrm_config(self) -> RRmConfig:
        return RRmConfig(self.mu, self.nu, self.c1, self.c2, self.delta)


def parse_policy(text: str, params: PolicyParams) -> PolicySpec:
    t = text.strip()
    if t.startswith("deviate(") and t.endswith(")"):
        inner = t[len("deviate(") : -1]
        parts = [p.strip() for p in inner.split(";")]
        if len(parts) not in (3, 4):
            raise UsageError(
                f"deviate needs 'deviate(COMPLIANT; DEVIANT; START[; END])', got {text!r}"
            )
        compliant = parse_policy(parts[0], params)
        deviant = parse_policy(parts[1], params)
        try:
            start = int(parts[2])
            end = int(parts[3]) if len(parts) == 4 else None
        except ValueError:
            raise UsageError(f"deviate start/end must be integers in {text!r}") from None
        return deviation_window_spec(compliant, deviant, start, end)

    head, sep, rest = t.partition(":")
    head = head.lower()
    plain = {
        "fp": fp_spec,
        "gfp": gfp_spec,
        "rm": rm_spec,
        "br_exploiter": br_exploiter_spec,
    }
    if head in plain:
        if sep:
            raise UsageError(f"policy {head!r} takes no ':' arguments, got {text!r}")
        return plain[head]()
    if head == "rgfp":
        if sep:
            raise UsageError("rgfp takes no ':' arguments; tune it with --mu/--window")
        return rgfp_spec(mu=params.mu)
    if head == "rrm":
        if sep:
            raise UsageError(
                "rrm takes no ':' arguments; tune it with --mu/--nu/--c1/--c2/--delta"
            )
        return rrm_spec(params.rrm_config())
    if head == "constant":
        try:
            return constant_spec(int(rest))
        except ValueError:
            raise UsageError(f"constant needs an integer action, got {text!r}") from None
    if head == "mixed":
        try:
            probs = [float(p) for p in rest.split(",") if p.strip() != ""]
        except ValueError:
            raise UsageError(f"mixed needs comma-separated probabilities, got {text!r}") from None
        if not probs:
            raise UsageError(f"mixed needs at least one probability, got {text!r}")
        return mixed_spec(probs)
    raise UsageError(
        f"unknown policy {text!r}; expected fp, gfp, rm, rgfp, rrm, br_exploiter, "
        "constant:A, mixed:p1,p2,..., or deviate(...)"
    )


# ---------------------------------------------------------------------------
# Game sources.
# ---------------------------------------------------------------------------


def resolve_game(preset: str | None, game_file: str | None, c: float) -> StageGame:
    if (preset is None) == (game_file is None):
        raise UsageError("give exactly one of --preset or --game")
    if game_file is not None:
        try:
            return load_game(game_file)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot load game file {game_file!r}: {exc}") from None
    name = preset.strip().lower()
    if name == "thm1":
        return make_thm1_game(c)
    if name == "thm2":
        return make_thm2_game(c)
    if name in ("imperfect1", "imperfect2"):
        pair = make_imperfect_pair(c)
        return pair[0] if name == "imperfect1" else pair[1]
    if name.startswith("random:"):
        parts = name.split(":")
        try:
            rows_cols = parts[1].split("x")
            rows, cols = int(rows_cols[0]), int(rows_cols[1])
            seed = int(parts[2]) if len(parts) > 2 else 0
            if len(parts) > 3 or len(rows_cols) != 2:
                raise ValueError
        except (ValueError, IndexError):
            raise UsageError(
                f"random preset must look like 'random:RxC:SEED', got {preset!r}"
            ) from None
        return random_game(rows, cols, seed)
    raise UsageError(
        f"unknown preset {preset!r}; expected thm1, thm2, imperfect1, imperfect2, "
        "or random:RxC:SEED"
    )


# ---------------------------------------------------------------------------
# Config files.
# ---------------------------------------------------------------------------

_CONFIG_COERCERS = {
    "horizon": int,
    "seeds": int,
    "seed": int,
    "jobs": int,
    "deviator": int,
    "c": float,
    "mu": float,
    "nu": float,
    "c1": float,
    "c2": float,
    "delta": float,
    "window": str,
    "monitoring": str,
    "out": str,
    "trace": str,
    "preset": str,
    "game": str,
    "policy1": str,
    "policy2": str,
    "algo": str,
    "adversary": str,
}


def read_config_file(path: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    values = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _CONFIG_COERCERS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_COERCERS[key](value)
        except ValueError:
            raise UsageError(
                f"{path}:{lineno}: bad value {value!r} for {key!r}"
            ) from None
    return values


def apply_config(args: argparse.Namespace, raw_argv: list[str]) -> None:
    if args.config is None:
        return
    explicit = set()
    for token in raw_argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    for key, value in read_config_file(args.config).items():
        if not hasattr(args, key):
            raise UsageError(
                f"config key {key!r} does not apply to the {args.command!r} command"
            )
        if key not in explicit:
            setattr(args, key, value)


# ---------------------------------------------------------------------------
# Argument parsing.
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, with_seeds: bool) -> None:
    parser.add_argument("--config", help="file of key = value defaults (flags win)")
    parser.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="steps per match")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if with_seeds:
        parser.add_argument(
            "--seeds", type=int, default=DEFAULT_NUM_SEEDS, help="number of seeds to average over"
        )
        parser.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    parser.add_argument(
        "--monitoring",
        choices=[PERFECT, IMPERFECT],
        default=PERFECT,
        help="whether agents observe the opponent's realized payoffs",
    )
    parser.add_argument(
        "--window",
        default="full",
        help="opponent-frequency window: 'full' or 'sliding:W'",
    )
    parser.add_argument("--mu", type=float, default=1.0, help="exploration payoff scale")
    parser.add_argument("--nu", type=float, default=1.0, help="secondary exploration payoff scale")
    parser.add_argument("--c1", type=float, default=9.0 / 8.0, help="epoch-length factor")
    parser.add_argument("--c2", type=float, default=8.0, help="epoch-length log factor")
    parser.add_argument("--delta", type=float, default=0.01, help="detection failure budget")
    parser.add_argument("--out", help="output directory")


def _add_game_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--preset",
        help="named game: thm1 | thm2 | imperfect1 | imperfect2 | random:RxC:SEED",
    )
    parser.add_argument("--game", help="game file (see README for the format)")
    parser.add_argument("--c", type=float, default=4.0, help="target ratio bound for presets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repgame",
        description="Simulate learning dynamics and deviation payoffs in repeated two-player games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # Flags a config file may supply stay optional here; handlers check them
    # after the config file has been merged in.
    p_run = sub.add_parser("run", help="play a single match")
    _add_game_source(p_run)
    p_run.add_argument("--policy1", help="row player's policy string")
    p_run.add_argument("--policy2", help="column player's policy string")
    p_run.add_argument(
        "--trace", default="trace.csv", help="trace CSV filename (written under --out)"
    )
    _add_common(p_run, with_seeds=False)

    p_ratio = sub.add_parser("ratio", help="estimate a deviation ratio over many seeds")
    _add_game_source(p_ratio)
    p_ratio.add_argument("--algo", help="the algorithm both sides run by default")
    p_ratio.add_argument("--adversary", help="the deviating policy string")
    p_ratio.add_argument(
        "--deviator", type=int, choices=[1, 2], help="which side deviates"
    )
    _add_common(p_ratio, with_seeds=True)

    p_scen = sub.add_parser("scenario", help="run a named experiment design")
    p_scen.add_argument("name", nargs="?", help="scenario name (see --list)")
    p_scen.add_argument("--list", action="store_true", help="list scenario names and exit")
    p_scen.add_argument("--c", type=float, default=4.0, help="target ratio bound for presets")
    _add_common(p_scen, with_seeds=True)

    return parser


# ---------------------------------------------------------------------------
# Subcommand implementations.
# ---------------------------------------------------------------------------


def _policy_params(args: argparse.Namespace) -> PolicyParams:
    return PolicyParams(args.mu, args.nu, args.c1, args.c2, args.delta)


def cmd_run(args: argparse.Namespace) -> dict:
    if args.policy1 is None or args.policy2 is None:
        raise UsageError("run needs --policy1 and --policy2 (flags or config file)")
    game = resolve_game(args.preset, args.game, args.c)
    params = _policy_params(args)
    window = parse_window(args.window)
    config = MatchConfig(
        game,
        parse_policy(args.policy1, params),
        parse_policy(args.policy2, params),
        args.horizon,
        args.seed,
        args.monitoring,
        window,
    )
    trace = run_match(config)
    trace_path = None
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        trace_path = os.path.join(args.out, args.trace)
        write_trace_csv(trace, trace_path)

    def phase_counts(agent: int) -> dict:
        labels = trace.phases(agent)
        counts: dict[str, int] = {}
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
        return counts

    return {
        "u1": trace.tail_mean(1),
        "u2": trace.tail_mean(2),
        "u1_mean": trace.mean(1),
        "u2_mean": trace.mean(2),
        "T": args.horizon,
        "seed": args.seed,
        "monitoring": args.monitoring,
        "window": format_window(window),
        "phases1": phase_counts(1),
        "phases2": phase_counts(2),
        "trace": trace_path,
    }


def cmd_ratio(args: argparse.Namespace) -> dict:
    if args.algo is None or args.adversary is None or args.deviator is None:
        raise UsageError("ratio needs --algo, --adversary, and --deviator (flags or config file)")
    if args.deviator not in (1, 2):
        raise UsageError(f"deviator must be 1 or 2, got {args.deviator}")
    game = resolve_game(args.preset, args.game, args.c)
    params = _policy_params(args)
    window = parse_window(args.window)
    algo = parse_policy(args.algo, params)
    adversary = parse_policy(args.adversary, params)
    seeds = seed_list(args.seeds, args.seed)
    res = rationality_ratio(
        game, algo, adversary, args.deviator, args.horizon, seeds, args.monitoring, window, args.jobs
    )
    summary = {
        "scenario": f"ratio:{args.algo}-vs-{args.adversary}",
        "ratio": res.ratio,
        "ratio_stderr": res.ratio_stderr,
        "u_self": res.u_self.__dict__,
        "u_dev": res.u_dev.__dict__,
        "T": res.horizon,
        "seeds": list(res.seeds),
        "deviator": res.deviator,
        "monitoring": args.monitoring,
        "window": format_window(window),
    }
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "summary.json"), "w") as handle:
            json.dump(summary, handle, indent=2)
            handle.write("\n")
    return summary


def cmd_scenario(args: argparse.Namespace) -> dict:
    if args.list:
        return {"scenarios": sorted(SCENARIOS)}
    if args.name is None:
        raise UsageError("give a scenario name or --list")
    if args.name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise UsageError(f"unknown scenario {args.name!r}; available: {known}")
    if args.out is None:
        raise UsageError("scenario requires --out DIR for its CSVs and summary.json")
    opts = ScenarioOptions(
        out=args.out,
        horizon=args.horizon,
        num_seeds=args.seeds,
        base_seed=args.seed,
        c=args.c,
        window=parse_window(args.window),
        monitoring=args.monitoring,
        mu=args.mu,
        nu=args.nu,
        c1=args.c1,
        c2=args.c2,
        delta=args.delta,
        jobs=args.jobs,
    )
    return run_scenario(args.name, opts)


def main(argv: list[str] | None = None) -> int:
    raw_argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(raw_argv)
    handlers = {"run": cmd_run, "ratio": cmd_ratio, "scenario": cmd_scenario}
    try:
        apply_config(args, raw_argv)
        # Re-validate values a config file may have injected.
        if getattr(args, "monitoring", PERFECT) not in (PERFECT, IMPERFECT):
            raise UsageError(f"monitoring must be 'perfect' or 'imperfect', got {args.monitoring!r}")
        try:
            parse_window(args.window)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        summary = handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - map any runtime failure to exit 3
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
