"""Session service.

Wire protocol: JSON frames, one per line. A WebSocket endpoint carries one
frame per message (browser clients); a plain TCP endpoint carries one frame
per newline-terminated line (script clients). Both speak the same messages:

  -> {"type": "new_session", "puzzle": "<id>"}
  -> {"type": "physical_step" | "virtual_step", "step": {...}}
  -> {"type": "edit_param", "field": "x", "value": 2.0}
  -> {"type": "undo"} | {"type": "reset"}
  -> {"type": "hint_request"}
  <- {"type": "snapshot", ...}            every state change answers with one
  <- {"type": "hint", "step": {...}, "residual_after": r}
  <- {"type": "error", "code": "E_*", "message": "...", "sequence_no": n|null}

One session per connection, frames processed strictly in arrival order.
Malformed frames produce an error reply and leave the session running.
"""

from __future__ import annotations

import asyncio
import json
import time
from pathlib import Path
from typing import Optional, Union

from websockets.asyncio.server import serve as ws_serve

from .engine import (
    GameState,
    apply_physical,
    apply_virtual,
    edit_virtual_param,
    new_session,
    reset,
    undo,
)
from .errors import InvalidSpecError, MalformedDocumentError, XformError
from .formats import PuzzleFile, load_puzzle, snapshot, snapshot_to_obj, step_from_obj, step_to_obj
from .scene import BrickModel
from .solver import suggest_hint

DEFAULT_PORT = 8737


def _frame(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _error_frame(code: str, message: str, sequence_no: Optional[int] = None) -> str:
    return _frame({"type": "error", "code": code, "message": message,
                   "sequence_no": sequence_no})


class PuzzleDirectory:
    """Resolves puzzle ids against a directory of .xpz.json files."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def load(self, puzzle_id: str) -> PuzzleFile:
        direct = self.root / f"{puzzle_id}.xpz.json"
        candidates = [direct] if direct.is_file() else []
        candidates += sorted(p for p in self.root.glob("*.xpz.json") if p != direct)
        for path in candidates:
            try:
                pf = load_puzzle(path)
            except XformError:
                continue
            if pf.spec.id == puzzle_id:
                return pf
        raise InvalidSpecError(f"no puzzle {puzzle_id!r} under {self.root}")


class Connection:
    """One client session; shared by the WebSocket and TCP transports."""

    def __init__(self, puzzles: PuzzleDirectory):
        self.puzzles = puzzles
        self.state: Optional[GameState] = None
        self.model: Optional[BrickModel] = None
        self._t0 = time.monotonic()

    def _now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def _snapshot_frame(self) -> str:
        assert self.state is not None
        snap = snapshot(self.state, model=self.model)
        return _frame({"type": "snapshot", **snapshot_to_obj(snap)})

    def handle(self, raw: str) -> str:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error_frame("E_PARSE", f"frame is not valid JSON: {exc}")
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return _error_frame("E_PARSE", "frame must be an object with a string 'type'")
        try:
            return self._dispatch(msg)
        except XformError as exc:
            return _error_frame(exc.code, str(exc), exc.sequence_no)

    def _dispatch(self, msg: dict) -> str:
        kind = msg["type"]
        if kind == "new_session":
            puzzle_id = msg.get("puzzle")
            if not isinstance(puzzle_id, str):
                raise MalformedDocumentError("new_session needs a 'puzzle' id")
            pf = self.puzzles.load(puzzle_id)
            self.state = new_session(pf.spec)
            self.model = pf.model
            self._t0 = time.monotonic()
            return self._snapshot_frame()

        if self.state is None:
            raise InvalidSpecError("no active session; send new_session first")

        if kind == "physical_step":
            step = step_from_obj(msg.get("step"))
            self.state = apply_physical(self.state, step, self._now_ms())
            return self._snapshot_frame()
        if kind == "virtual_step":
            step = step_from_obj(msg.get("step"))
            self.state = apply_virtual(self.state, step, self._now_ms())
            return self._snapshot_frame()
        if kind == "edit_param":
            field = msg.get("field")
            if not isinstance(field, str) or "value" not in msg:
                raise MalformedDocumentError("edit_param needs 'field' and 'value'")
            self.state = edit_virtual_param(self.state, field, float(msg["value"]),
                                            self._now_ms())
            return self._snapshot_frame()
        if kind == "undo":
            self.state = undo(self.state, self._now_ms())
            return self._snapshot_frame()
        if kind == "reset":
            self.state = reset(self.state, self._now_ms())
            return self._snapshot_frame()
        if kind == "hint_request":
            hint = suggest_hint(self.state.virtual_matrix, self.state.physical_matrix,
                                self.state.spec.weights, self.state.spec.tolerance)
            return _frame({"type": "hint", "step": step_to_obj(hint.suggested_step),
                           "residual_after": hint.residual_after})
        return _error_frame("E_PARSE", f"unknown message type {kind!r}")


class SessionServer:
    """WebSocket server plus plain-TCP fallback, both bound to localhost."""

    def __init__(self, puzzle_dir: Union[str, Path], port: int = DEFAULT_PORT,
                 tcp_port: Optional[int] = None, host: str = "127.0.0.1"):
        self.puzzles = PuzzleDirectory(puzzle_dir)
        self.host = host
        self.port = port
        self.tcp_port = tcp_port if tcp_port is not None else (port + 1 if port else 0)
        self._ws_server = None
        self._tcp_server = None

    async def _ws_handler(self, websocket):
        conn = Connection(self.puzzles)
        async for message in websocket:
            text = message if isinstance(message, str) else message.decode("utf-8")
            for line in text.splitlines():
                if line.strip():
                    await websocket.send(conn.handle(line))

    async def _tcp_handler(self, reader, writer):
        conn = Connection(self.puzzles)
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                text = line.decode("utf-8").strip()
                if not text:
                    continue
                writer.write((conn.handle(text) + "\n").encode("utf-8"))
                await writer.drain()
        finally:
            writer.close()

    async def start(self) -> None:
        self._ws_server = await ws_serve(self._ws_handler, self.host, self.port)
        self.port = self._ws_server.sockets[0].getsockname()[1]
        self._tcp_server = await asyncio.start_server(self._tcp_handler, self.host, self.tcp_port)
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]

    async def stop(self) -> None:
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()


async def _serve_forever(server: SessionServer) -> None:
    await server.start()
    print(f"serving ws://{server.host}:{server.port} "
          f"(tcp fallback {server.host}:{server.tcp_port})")
    try:
        await asyncio.Future()
    finally:
        await server.stop()


def run_server(puzzle_dir: Union[str, Path], port: int = DEFAULT_PORT,
               tcp_port: Optional[int] = None) -> None:
    """Blocking entry point for the CLI; stops on KeyboardInterrupt."""
    try:
        asyncio.run(_serve_forever(SessionServer(puzzle_dir, port, tcp_port)))
    except KeyboardInterrupt:
        pass
