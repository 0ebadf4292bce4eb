"""Command-line interface: parsing, exit codes, config files, JSON output."""

import json
import subprocess
import sys

import pytest

from repgame.arena import TRACE_HEADER
from repgame.cli import PolicyParams, main, parse_policy, read_config_file, resolve_game
from repgame.cli import UsageError

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

PARAMS = PolicyParams()


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# Policy strings.
# ---------------------------------------------------------------------------


def test_parse_plain_policies():
    for name in ("fp", "gfp", "rm", "rgfp", "rrm", "br_exploiter"):
        assert parse_policy(name, PARAMS).kind in (name, "rgfp", "rrm")
    assert parse_policy("FP", PARAMS).kind == "fp"


def test_parse_constant_and_mixed():
    spec = parse_policy("constant:3", PARAMS)
    assert spec.kind == "constant" and spec.params["action"] == 3
    spec = parse_policy("mixed:0.25,0.75", PARAMS)
    assert spec.kind == "mixed" and spec.params["probs"] == (0.25, 0.75)


def test_parse_deviate_nested():
    spec = parse_policy("deviate(rgfp; constant:3; 7)", PARAMS)
    assert spec.kind == "deviation_window"
    assert spec.params["compliant"].kind == "rgfp"
    assert spec.params["deviant"].kind == "constant"
    assert spec.params["start"] == 7 and spec.params["end"] is None
    spec = parse_policy("deviate(fp; mixed:0.5,0.5; 3; 9)", PARAMS)
    assert spec.params["end"] == 9


def test_parse_policy_rejects_garbage():
    for bad in ("bogus", "constant:x", "mixed:", "deviate(fp; rm)", "fp:3", "rgfp:2"):
        with pytest.raises(UsageError):
            parse_policy(bad, PARAMS)


def test_rrm_policy_carries_tuned_config():
    params = PolicyParams(c1=2.0, c2=4.0, delta=0.05)
    spec = parse_policy("rrm", params)
    cfg = spec.params["cfg"]
    assert cfg.c1 == 2.0 and cfg.c2 == 4.0 and cfg.delta == 0.05


# ---------------------------------------------------------------------------
# Game sources.
# ---------------------------------------------------------------------------


def test_resolve_presets():
    assert resolve_game("thm1", None, 4.0).rows == 2
    assert resolve_game("thm2", None, 4.0).cols == 2
    g1 = resolve_game("imperfect1", None, 4.0)
    g2 = resolve_game("imperfect2", None, 4.0)
    assert g1.payoff1.tolist() == g2.payoff1.tolist()
    assert g1.payoff2.tolist() != g2.payoff2.tolist()
    game = resolve_game("random:3x4:7", None, 4.0)
    assert (game.rows, game.cols) == (3, 4)


def test_resolve_game_rejects_bad_input(tmp_path):
    with pytest.raises(UsageError):
        resolve_game(None, None, 4.0)
    with pytest.raises(UsageError):
        resolve_game("thm1", "afile", 4.0)
    with pytest.raises(UsageError):
        resolve_game("nope", None, 4.0)
    with pytest.raises(UsageError):
        resolve_game("random:3x", None, 4.0)
    with pytest.raises(UsageError):
        resolve_game(None, str(tmp_path / "missing.game"), 4.0)


def test_game_file_round_trip_through_cli(tmp_path, capsys):
    from repgame.game import save_game
    from repgame.arena import make_thm1_game

    path = str(tmp_path / "g.game")
    save_game(make_thm1_game(4.0), path)
    summary = run_json(
        capsys,
        ["run", "--game", path, "--policy1", "fp", "--policy2", "constant:3", "--horizon", "300"],
    )
    assert summary["u2"] == pytest.approx(50.0)


# ---------------------------------------------------------------------------
# run subcommand.
# ---------------------------------------------------------------------------


def test_run_reports_values_and_writes_trace(tmp_path, capsys):
    out_dir = str(tmp_path / "out")
    summary = run_json(
        capsys,
        [
            "run", "--preset", "thm1", "--policy1", "fp", "--policy2", "constant:3",
            "--horizon", "400", "--out", out_dir, "--trace", "t.csv",
        ],
    )
    assert summary["u1"] == pytest.approx(6.0)
    assert summary["u2"] == pytest.approx(50.0)
    assert summary["phases1"] == {"fp": 400}
    with open(summary["trace"]) as handle:
        assert handle.readline().strip() == TRACE_HEADER
        assert sum(1 for _ in handle) == 400


def test_run_window_flag(capsys):
    summary = run_json(
        capsys,
        ["run", "--preset", "thm1", "--policy1", "gfp", "--policy2", "gfp",
         "--horizon", "50", "--window", "sliding:3"],
    )
    assert summary["window"] == "sliding:3"
    assert summary["phases1"] == {"gfp": 50}


def test_run_requires_policies(capsys):
    code, _, err = run_cli(capsys, ["run", "--preset", "thm1"])
    assert code == 2 and "policy" in err


def test_run_unknown_policy_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, ["run", "--preset", "thm1", "--policy1", "bogus", "--policy2", "fp"]
    )
    assert code == 2 and "unknown policy" in err


def test_run_invalid_action_is_runtime_error(capsys):
    code, _, err = run_cli(
        capsys,
        ["run", "--preset", "thm1", "--policy1", "constant:9", "--policy2", "fp",
         "--horizon", "10"],
    )
    assert code == 3 and err.startswith("error:")


def test_bad_window_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys,
        ["run", "--preset", "thm1", "--policy1", "fp", "--policy2", "fp",
         "--window", "sliding:x"],
    )
    assert code == 2


# ---------------------------------------------------------------------------
# ratio subcommand.
# ---------------------------------------------------------------------------


def test_ratio_pinned_json_keys(capsys, tmp_path):
    out_dir = str(tmp_path / "r")
    summary = run_json(
        capsys,
        ["ratio", "--preset", "thm1", "--algo", "fp", "--adversary", "constant:3",
         "--deviator", "2", "--horizon", "500", "--seeds", "2", "--out", out_dir],
    )
    for key in ("scenario", "ratio", "ratio_stderr", "u_self", "u_dev", "T", "seeds"):
        assert key in summary
    assert summary["ratio"] == pytest.approx(5.0)
    assert summary["seeds"] == [0, 1]
    with open(tmp_path / "r" / "summary.json") as handle:
        assert json.load(handle) == summary


def test_ratio_requires_all_three(capsys):
    code, _, err = run_cli(capsys, ["ratio", "--preset", "thm1", "--algo", "fp"])
    assert code == 2 and "deviator" in err


# ---------------------------------------------------------------------------
# scenario subcommand.
# ---------------------------------------------------------------------------


def test_scenario_list(capsys):
    summary = run_json(capsys, ["scenario", "--list"])
    assert "thm1-fp-exploit" in summary["scenarios"]
    assert len(summary["scenarios"]) == 7


def test_scenario_requires_out(capsys):
    code, _, err = run_cli(capsys, ["scenario", "thm1-fp-exploit"])
    assert code == 2 and "--out" in err


def test_scenario_requires_name(capsys):
    code, _, err = run_cli(capsys, ["scenario"])
    assert code == 2


def test_scenario_unknown_name(capsys, tmp_path):
    code, _, err = run_cli(capsys, ["scenario", "nope", "--out", str(tmp_path)])
    assert code == 2 and "unknown scenario" in err


def test_scenario_end_to_end(capsys, tmp_path):
    summary = run_json(
        capsys,
        ["scenario", "thm1-fp-exploit", "--out", str(tmp_path), "--horizon", "500",
         "--seeds", "2"],
    )
    assert summary["ratio"] == pytest.approx(5.0)
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "thm1_fp_exploit_selfplay.csv").exists()


# ---------------------------------------------------------------------------
# config files.
# ---------------------------------------------------------------------------


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "cfg"
    cfg.write_text("horizon = 300  # comment\nseeds = 2\nadversary = constant:3\n")
    summary = run_json(
        capsys,
        ["ratio", "--preset", "thm1", "--algo", "fp", "--deviator", "2",
         "--config", str(cfg)],
    )
    assert summary["T"] == 300
    assert summary["seeds"] == [0, 1]
    assert summary["scenario"].endswith("constant:3")


def test_explicit_flags_beat_config(tmp_path, capsys):
    cfg = tmp_path / "cfg"
    cfg.write_text("horizon = 300\nseeds = 2\n")
    summary = run_json(
        capsys,
        ["ratio", "--preset", "thm1", "--algo", "fp", "--adversary", "constant:3",
         "--deviator", "2", "--config", str(cfg), "--horizon", "600"],
    )
    assert summary["T"] == 600
    assert summary["seeds"] == [0, 1]


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg"
    cfg.write_text("warp_speed = 9\n")
    code, _, err = run_cli(
        capsys,
        ["ratio", "--preset", "thm1", "--algo", "fp", "--adversary", "fp",
         "--deviator", "2", "--config", str(cfg)],
    )
    assert code == 2 and "warp_speed" in err


def test_config_rejects_bad_syntax(tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("horizon 300\n")
    with pytest.raises(UsageError, match="key = value"):
        read_config_file(str(cfg))


def test_config_rejects_bad_value(tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("horizon = soon\n")
    with pytest.raises(UsageError, match="bad value"):
        read_config_file(str(cfg))


def test_config_missing_file(capsys):
    code, _, err = run_cli(
        capsys,
        ["ratio", "--preset", "thm1", "--algo", "fp", "--adversary", "fp",
         "--deviator", "2", "--config", "/nonexistent/cfg"],
    )
    assert code == 2


# ---------------------------------------------------------------------------
# process-level entry.
# ---------------------------------------------------------------------------


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "repgame.cli", "run", "--preset", "thm2",
         "--policy1", "rm", "--policy2", "rm", "--horizon", "300"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    summary = json.loads(proc.stdout)
    assert summary["u1"] == pytest.approx(5.0)


def test_module_entry_point_usage_error_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "repgame.cli", "run", "--preset", "thm1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
