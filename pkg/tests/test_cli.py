from __future__ import annotations

import json

import pytest

from xformplay.cli import cli, parse_step, resolve_puzzle_dir
from xformplay.errors import InvalidParameterError
from xformplay import Rotate, RotationAxis, Scale, Translate, Vec3


def run(*argv) -> int:
    return cli(list(argv))


def test_env_var_overrides_puzzle_dir(monkeypatch):
    monkeypatch.delenv("XFORMPLAY_PUZZLE_DIR", raising=False)
    assert resolve_puzzle_dir("./flag-dir") == "./flag-dir"
    monkeypatch.setenv("XFORMPLAY_PUZZLE_DIR", "/somewhere/else")
    assert resolve_puzzle_dir("./flag-dir") == "/somewhere/else"


def test_parse_step_forms():
    assert parse_step(["translate", "1", "0", "-2.5"]) == Translate(Vec3(1.0, 0.0, -2.5))
    assert parse_step(["rotate", "z", "90"]) == Rotate(RotationAxis.Z, 90.0)
    assert parse_step(["scale", "2"]) == Scale(2.0)
    with pytest.raises(InvalidParameterError):
        parse_step(["rotate", "w", "90"])
    with pytest.raises(InvalidParameterError):
        parse_step(["translate", "1"])


def test_gen_is_deterministic(tmp_path):
    a = tmp_path / "a.xpz.json"
    b = tmp_path / "b.xpz.json"
    assert run("gen", "--seed", "7", "--level", "function", "--difficulty", "1", "-o", str(a)) == 0
    assert run("gen", "--seed", "7", "--level", "function", "--difficulty", "1", "-o", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_to_stdout(capsys):
    assert run("gen", "--seed", "3", "--level", "mapping", "--difficulty", "2") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spec"]["level"] == "mapping"


def test_unknown_flag_is_usage_error():
    assert run("gen", "--nonsense") == 2
    assert run("definitely-not-a-command") == 2


def test_solve_prints_hints_and_succeeds(tmp_path, capsys):
    puzzle = tmp_path / "p.xpz.json"
    assert run("gen", "--seed", "99", "--level", "function", "--difficulty", "5",
               "-o", str(puzzle)) == 0
    capsys.readouterr()
    assert run("solve", str(puzzle)) == 0
    out = capsys.readouterr().out
    assert "hint 1:" in out
    assert "solved in" in out
    steps = out.count("hint ")
    assert steps <= 3


def test_missing_puzzle_file_is_domain_error(tmp_path):
    assert run("solve", str(tmp_path / "nope.xpz.json")) == 1


def test_play_records_replayable_log(tmp_path, capsys, monkeypatch):
    puzzle = tmp_path / "p.xpz.json"
    run("gen", "--seed", "41", "--level", "function", "--difficulty", "1", "-o", str(puzzle))
    pf_doc = json.loads(puzzle.read_text())
    target = pf_doc["spec"]["target_steps"]

    def step_words(obj):
        if obj["kind"] == "translate":
            return "translate %g %g %g" % tuple(obj["v"])
        if obj["kind"] == "rotate":
            return "rotate %s %g" % (obj["axis"], obj["angle"])
        return "scale %g" % obj["factor"]

    script = ["target"] + ["virt " + step_words(s) for s in target] + ["panel", "quit"]
    log = tmp_path / "session.xlog.jsonl"

    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("\n".join(script) + "\n"))
    assert run("play", "--puzzle", str(puzzle), "--log", str(log)) == 0
    out = capsys.readouterr().out
    assert "solved!" in out

    assert run("replay", "--log", str(log), "--puzzle", str(puzzle), "--verify") == 0


def test_play_reports_errors_and_continues(tmp_path, capsys, monkeypatch):
    puzzle = tmp_path / "p.xpz.json"
    run("gen", "--seed", "41", "--level", "function", "--difficulty", "1", "-o", str(puzzle))
    script = ["virt rotate q 90", "undo", "hint", "quit"]
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("\n".join(script) + "\n"))
    assert run("play", "--puzzle", str(puzzle)) == 0
    out = capsys.readouterr().out
    assert "error E_PARAM" in out or "error E_MOVE" in out
    assert "error E_UNDO" in out


def test_replay_verify_fails_for_unsolved_log(tmp_path, monkeypatch, capsys):
    puzzle = tmp_path / "p.xpz.json"
    run("gen", "--seed", "41", "--level", "function", "--difficulty", "1", "-o", str(puzzle))
    log = tmp_path / "short.xlog.jsonl"
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("target\nquit\n"))
    assert run("play", "--puzzle", str(puzzle), "--log", str(log)) == 0
    capsys.readouterr()
    assert run("replay", "--log", str(log), "--puzzle", str(puzzle)) == 0
    assert run("replay", "--log", str(log), "--puzzle", str(puzzle), "--verify") == 1


def test_gen_pipeline_many_seeds(tmp_path):
    for seed in range(10):
        puzzle = tmp_path / f"s{seed}.xpz.json"
        assert run("gen", "--seed", str(seed), "--level", "function",
                   "--difficulty", str(1 + seed % 5), "-o", str(puzzle)) == 0
        assert run("solve", str(puzzle)) == 0
