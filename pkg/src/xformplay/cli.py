"""Command line: generate, solve, replay, play and serve puzzles.

Exit codes: 0 success, 1 domain error (printed with its code), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .engine import (
    GameState,
    Level,
    Status,
    apply_physical,
    apply_physical_target,
    apply_virtual,
    edit_virtual_param,
    generate_puzzle,
    new_session,
    replay,
    reset,
    session_error,
    undo,
)
from .errors import InvalidParameterError, XformError
from .formats import (
    FORMAT_VERSION,
    EventLogWriter,
    PuzzleFile,
    load_puzzle,
    puzzle_to_json,
    read_log,
    save_puzzle,
)
from .scene import demo_model
from .server import DEFAULT_PORT, run_server
from .solver import suggest_hint
from .xform import Rotate, RotationAxis, Scale, TransformStep, Translate, Vec3

MAX_HINTS = 8


def step_str(step: TransformStep) -> str:
    if isinstance(step, Translate):
        return f"translate {step.v.x:g} {step.v.y:g} {step.v.z:g}"
    if isinstance(step, Rotate):
        return f"rotate {step.axis.value} {step.angle:g}"
    return f"scale {step.factor:g}"


def parse_step(tokens: Sequence[str]) -> TransformStep:
    if not tokens:
        raise InvalidParameterError("empty step; try 'translate 1 0 0'")
    kind = tokens[0]
    try:
        if kind == "translate" and len(tokens) == 4:
            return Translate(Vec3(float(tokens[1]), float(tokens[2]), float(tokens[3])))
        if kind == "rotate" and len(tokens) == 3:
            return Rotate(RotationAxis(tokens[1]), float(tokens[2]))
        if kind == "scale" and len(tokens) == 2:
            return Scale(float(tokens[1]))
    except ValueError as exc:
        raise InvalidParameterError(f"bad step arguments: {exc}") from exc
    raise InvalidParameterError(
        f"cannot parse step {' '.join(tokens)!r}; "
        "use 'translate X Y Z', 'rotate x|y|z DEG' or 'scale F'")


def _status_line(state: GameState) -> str:
    err = session_error(state)
    return (f"[{state.status.value}] err t={err.translation:.4g} "
            f"r={err.rotation:.4g}deg s={err.scale:.4g} total={err.total:.4g}")


def _print_panel(state: GameState, out) -> None:
    for name, mat in (("physical", state.physical_matrix), ("virtual", state.virtual_matrix)):
        print(f"{name}:", file=out)
        for i in range(4):
            row = mat.row(i)
            print("  [" + "  ".join(f"{v: .6g}" for v in row) + "]", file=out)


def _solve_session(state: GameState, on_hint=None) -> GameState:
    hints = 0
    while state.status is Status.PLAYING and hints < MAX_HINTS:
        hint = suggest_hint(state.virtual_matrix, state.physical_matrix,
                            state.spec.weights, state.spec.tolerance)
        state = apply_virtual(state, hint.suggested_step)
        hints += 1
        if on_hint:
            on_hint(hints, hint)
    return state


# -- subcommands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = generate_puzzle(args.seed, Level(args.level), args.difficulty)
    pf = PuzzleFile(FORMAT_VERSION, spec, demo_model())
    if args.out:
        save_puzzle(args.out, pf)
        print(f"wrote {args.out} ({spec.id})")
    else:
        sys.stdout.write(puzzle_to_json(pf))
    return 0


def cmd_solve(args) -> int:
    pf = load_puzzle(args.puzzle)
    state = apply_physical_target(new_session(pf.spec))
    print(f"puzzle {pf.spec.id}: target " +
          " | ".join(step_str(s) for s in pf.spec.target_steps))

    def report(n, hint):
        print(f"hint {n}: {step_str(hint.suggested_step)}  (residual {hint.residual_after:.4g})")

    state = _solve_session(state, report)
    if state.status is not Status.SOLVED:
        print("error E_UNSOLVED: hint sequence did not converge", file=sys.stderr)
        return 1
    print(f"solved in {state.move_count} virtual steps")
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fp:
            writer = EventLogWriter(fp, pf.spec)
            for event in state.event_log:
                writer.append(event)
        print(f"wrote solution log {args.log}")
    return 0


def cmd_replay(args) -> int:
    pf = load_puzzle(args.puzzle)
    logfile = read_log(args.log)
    if logfile.header.puzzle_id != pf.spec.id:
        print(f"error E_LOG: log belongs to {logfile.header.puzzle_id!r}, "
              f"not {pf.spec.id!r}", file=sys.stderr)
        return 1
    state = replay(pf.spec, logfile.events)
    print(f"replayed {len(logfile.events)} events: status={state.status.value} "
          f"moves={state.move_count}")
    if args.verify and state.status is not Status.SOLVED:
        print("verify: terminal status is not solved", file=sys.stderr)
        return 1
    return 0


def cmd_play(args) -> int:
    pf = load_puzzle(args.puzzle)
    state = new_session(pf.spec)
    started = time.monotonic()
    log_fp = None
    writer = None
    written = 0
    if args.log:
        log_fp = open(args.log, "w", encoding="utf-8")
        writer = EventLogWriter(log_fp, pf.spec)

    def now_ms() -> int:
        return int((time.monotonic() - started) * 1000)

    out = sys.stdout
    print(f"puzzle {pf.spec.id} level={pf.spec.level.value} "
          f"controls={','.join(sorted(pf.spec.allowed_controls))}", file=out)
    print("commands: phys <step> | virt <step> | edit <field> <val> | hint | "
          "undo | reset | target | panel | quit", file=out)

    try:
        for line in sys.stdin:
            tokens = line.split()
            if not tokens:
                continue
            cmd, rest = tokens[0], tokens[1:]
            try:
                if cmd == "quit":
                    break
                elif cmd == "phys":
                    state = apply_physical(state, parse_step(rest), now_ms())
                elif cmd == "virt":
                    state = apply_virtual(state, parse_step(rest), now_ms())
                elif cmd == "edit" and len(rest) == 2:
                    state = edit_virtual_param(state, rest[0], float(rest[1]), now_ms())
                elif cmd == "undo":
                    state = undo(state, now_ms())
                elif cmd == "reset":
                    state = reset(state, now_ms())
                elif cmd == "target":
                    state = apply_physical_target(state, now_ms())
                elif cmd == "hint":
                    hint = suggest_hint(state.virtual_matrix, state.physical_matrix,
                                        state.spec.weights, state.spec.tolerance)
                    print(f"hint: {step_str(hint.suggested_step)}  "
                          f"(residual {hint.residual_after:.4g})", file=out)
                    continue
                elif cmd == "panel":
                    _print_panel(state, out)
                    continue
                else:
                    print(f"error E_PARSE: unknown command {cmd!r}", file=out)
                    continue
            except ValueError as exc:
                print(f"error E_PARAM: {exc}", file=out)
                continue
            except XformError as exc:
                print(f"error {exc.code}: {exc}", file=out)
                continue
            if writer:
                for event in state.event_log[written:]:
                    writer.append(event)
                written = len(state.event_log)
            print(_status_line(state), file=out)
            if state.status is Status.SOLVED:
                print("solved!", file=out)
    finally:
        if log_fp:
            log_fp.close()
    return 0


def resolve_puzzle_dir(cli_value: str) -> str:
    """XFORMPLAY_PUZZLE_DIR wins over the --puzzle-dir flag."""
    return os.environ.get("XFORMPLAY_PUZZLE_DIR", cli_value)


def cmd_serve(args) -> int:
    run_server(resolve_puzzle_dir(args.puzzle_dir), args.port, args.tcp_port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xformplay",
                                     description="transformation puzzle workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a puzzle file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--level", choices=[lv.value for lv in Level], required=True)
    gen.add_argument("--difficulty", type=int, required=True)
    gen.add_argument("-o", "--out", type=Path)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="print the hint sequence that solves a puzzle")
    solve.add_argument("puzzle", type=Path)
    solve.add_argument("--log", type=Path, help="record the solution session to this file")
    solve.set_defaults(func=cmd_solve)

    rep = sub.add_parser("replay", help="re-run an event log against a puzzle")
    rep.add_argument("--log", type=Path, required=True)
    rep.add_argument("--puzzle", type=Path, required=True)
    rep.add_argument("--verify", action="store_true",
                     help="exit 0 only if the replayed session ends solved")
    rep.set_defaults(func=cmd_replay)

    play = sub.add_parser("play", help="interactive session on stdin/stdout")
    play.add_argument("--puzzle", type=Path, required=True)
    play.add_argument("--log", type=Path, help="record events to this file")
    play.set_defaults(func=cmd_play)

    serve = sub.add_parser("serve", help="run the session service")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--tcp-port", type=int, default=None)
    serve.add_argument("--puzzle-dir", default=".",
                       help="directory of .xpz.json files (XFORMPLAY_PUZZLE_DIR overrides)")
    serve.set_defaults(func=cmd_serve)
    return parser


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI invocation and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except XformError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error E_IO: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())
