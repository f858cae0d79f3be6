"""The puzzle itself: a dual-model state machine.

One session tracks two poses. The "physical" model is moved freely (the
hand-held brick); the wireframe pre-image never moves, and the player instead
builds a step list for the virtual model until its composed matrix matches the
physical one within tolerance.

States are immutable; every operation takes a state and returns the successor,
so a session replays deterministically from its event log.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

from .errors import (
    CorruptLogError,
    DecompositionError,
    IllegalMoveError,
    InvalidFieldError,
    InvalidParameterError,
    InvalidSpecError,
    NoActiveStepError,
    NothingToUndoError,
    SessionFinishedError,
    XformError,
)
from .solver import (
    DEFAULT_TOLERANCE,
    DEFAULT_WEIGHTS,
    ErrorWeights,
    PoseError,
    decompose_trs,
    is_aligned,
    pose_error,
)
from .xform import (
    IDENTITY,
    Mat4,
    Rotate,
    RotationAxis,
    Scale,
    TransformStep,
    Translate,
    Vec3,
    compose,
    step_matrix,
)


class Level(Enum):
    """Progression stages; each unlocks more of the interface.

    MOTION: free physical play only. MAPPING: adds mapped points and tracking
    annotations plus virtual steps. FUNCTION: adds the matrix panel and
    parameter (slider) editing.
    """

    MOTION = "motion"
    MAPPING = "mapping"
    FUNCTION = "function"


class Status(Enum):
    PLAYING = "playing"
    SOLVED = "solved"


class Actor(Enum):
    PHYSICAL = "physical"
    VIRTUAL = "virtual"


ALL_CONTROLS = frozenset({
    "translate_x", "translate_y", "translate_z",
    "rotate_x", "rotate_y", "rotate_z",
    "scale",
})

_AXIS_ORDER = (RotationAxis.X, RotationAxis.Y, RotationAxis.Z)


@dataclass(frozen=True)
class ApplyStep:
    step: TransformStep


@dataclass(frozen=True)
class EditLastStepParam:
    field: str
    value: float


@dataclass(frozen=True)
class Undo:
    pass


@dataclass(frozen=True)
class Reset:
    pass


MoveAction = Union[ApplyStep, EditLastStepParam, Undo, Reset]


@dataclass(frozen=True)
class MoveEvent:
    seq: int
    actor: Actor
    action: MoveAction
    t_ms: int = 0


@dataclass(frozen=True)
class PuzzleSpec:
    id: str
    level: Level
    target_steps: tuple[TransformStep, ...]
    allowed_controls: frozenset[str]
    tolerance: PoseError = DEFAULT_TOLERANCE
    weights: ErrorWeights = DEFAULT_WEIGHTS
    seed: int = 0
    model_ref: str = "demo"


@dataclass(frozen=True)
class GameState:
    spec: PuzzleSpec
    physical_matrix: Mat4
    virtual_steps: tuple[TransformStep, ...]
    virtual_matrix: Mat4
    status: Status
    move_count: int
    event_log: tuple[MoveEvent, ...]


def step_controls(step: TransformStep) -> frozenset[str]:
    """Interface controls a step actually exercises (identity parts need none)."""
    if isinstance(step, Translate):
        names = []
        for axis, comp in zip("xyz", (step.v.x, step.v.y, step.v.z)):
            if comp != 0.0:
                names.append(f"translate_{axis}")
        return frozenset(names)
    if isinstance(step, Rotate):
        return frozenset() if step.angle == 0.0 else frozenset({f"rotate_{step.axis.value}"})
    if isinstance(step, Scale):
        return frozenset() if step.factor == 1.0 else frozenset({"scale"})
    raise InvalidParameterError(f"unknown step type {type(step).__name__}")


def validate_spec(spec: PuzzleSpec) -> None:
    """Raise InvalidSpecError unless the puzzle is well-formed and solvable."""
    if not spec.id:
        raise InvalidSpecError("puzzle id must be non-empty")
    if not isinstance(spec.level, Level):
        raise InvalidSpecError(f"unknown level {spec.level!r}")
    if not 0 <= spec.seed < 2 ** 64:
        raise InvalidSpecError("seed must fit in 64 unsigned bits")
    unknown = set(spec.allowed_controls) - ALL_CONTROLS
    if unknown:
        raise InvalidSpecError(f"unknown controls: {sorted(unknown)}")
    for w in (spec.weights.translation, spec.weights.rotation, spec.weights.scale):
        if not (math.isfinite(w) and w > 0.0):
            raise InvalidSpecError("weights must be positive")
    for tol in (spec.tolerance.translation, spec.tolerance.rotation, spec.tolerance.scale):
        if not (math.isfinite(tol) and tol >= 0.0):
            raise InvalidSpecError("tolerance components must be non-negative")

    try:
        target = compose(spec.target_steps)
        dec = decompose_trs(target)
    except DecompositionError as exc:
        raise InvalidSpecError(f"target is not a pure TRS transform: {exc}") from exc

    allowed = spec.allowed_controls
    # translation reachable: whatever lives on locked axes must fit in tolerance
    locked_sq = 0.0
    for axis, comp in zip("xyz", dec.translation.to_tuple()):
        if f"translate_{axis}" not in allowed:
            locked_sq += comp * comp
    if math.sqrt(locked_sq) > spec.tolerance.translation:
        raise InvalidSpecError("allowed controls cannot reach the target translation")
    if dec.angle > spec.tolerance.rotation:
        aligned_axis = None
        for axis, comp in zip(_AXIS_ORDER, dec.axis.to_tuple()):
            if abs(comp) > 1.0 - 1e-9:
                aligned_axis = axis
        if aligned_axis is not None:
            needed = {f"rotate_{aligned_axis.value}"}
        else:
            needed = {"rotate_x", "rotate_y", "rotate_z"}
        if not needed <= allowed:
            raise InvalidSpecError("allowed controls cannot reach the target rotation")
    if abs(math.log(dec.scale)) > spec.tolerance.scale and "scale" not in allowed:
        raise InvalidSpecError("allowed controls cannot reach the target scale")


def _physical_touched(log: tuple[MoveEvent, ...]) -> bool:
    """True if a physical move happened since the last reset."""
    for ev in reversed(log):
        if isinstance(ev.action, Reset):
            return False
        if ev.actor is Actor.PHYSICAL and isinstance(ev.action, ApplyStep):
            return True
    return False


def _evaluate_status(spec: PuzzleSpec, physical: Mat4, virtual: Mat4,
                     log: tuple[MoveEvent, ...]) -> Status:
    # Both matrices start as identity, which would count as aligned; winning
    # additionally requires that the physical model has actually been moved.
    if not _physical_touched(log):
        return Status.PLAYING
    if is_aligned(virtual, physical, spec.tolerance):
        return Status.SOLVED
    return Status.PLAYING


def new_session(spec: PuzzleSpec) -> GameState:
    """Fresh session: both poses identity, status playing, empty log."""
    validate_spec(spec)
    return GameState(spec, IDENTITY, (), IDENTITY, Status.PLAYING, 0, ())


def _require_playing(state: GameState) -> None:
    if state.status is not Status.PLAYING:
        raise SessionFinishedError("session already solved")


def apply_physical(state: GameState, step: TransformStep, t_ms: int = 0) -> GameState:
    """Move the physical model (free-form; left-multiplies the physical pose)."""
    _require_playing(state)
    if isinstance(step, Scale) and state.spec.level is not Level.FUNCTION:
        raise IllegalMoveError("a hand-held model cannot scale; simulated scale needs function level")
    physical = step_matrix(step) @ state.physical_matrix
    event = MoveEvent(len(state.event_log) + 1, Actor.PHYSICAL, ApplyStep(step), t_ms)
    log = state.event_log + (event,)
    return replace(state,
                   physical_matrix=physical,
                   event_log=log,
                   status=_evaluate_status(state.spec, physical, state.virtual_matrix, log))


def apply_physical_target(state: GameState, t_ms: int = 0) -> GameState:
    """Apply the spec's target motion to the physical model, one move per step."""
    for step in state.spec.target_steps:
        state = apply_physical(state, step, t_ms)
    return state


def apply_virtual(state: GameState, step: TransformStep, t_ms: int = 0) -> GameState:
    """Append a step to the virtual model's list and recompose."""
    _require_playing(state)
    if state.spec.level is Level.MOTION:
        raise IllegalMoveError("virtual moves are locked at motion level")
    needed = step_controls(step)
    if not needed <= state.spec.allowed_controls:
        raise IllegalMoveError(f"controls not allowed: {sorted(needed - state.spec.allowed_controls)}")
    steps = state.virtual_steps + (step,)
    virtual = compose(steps)
    event = MoveEvent(len(state.event_log) + 1, Actor.VIRTUAL, ApplyStep(step), t_ms)
    log = state.event_log + (event,)
    return replace(state,
                   virtual_steps=steps,
                   virtual_matrix=virtual,
                   move_count=state.move_count + 1,
                   event_log=log,
                   status=_evaluate_status(state.spec, state.physical_matrix, virtual, log))


_STEP_FIELDS = {Translate: ("x", "y", "z"), Rotate: ("angle",), Scale: ("factor",)}


def edit_virtual_param(state: GameState, field: str, value: float, t_ms: int = 0) -> GameState:
    """Replace one parameter of the most recent virtual step (slider drag).

    A drag is any number of edits to the same step; the step list never grows.
    """
    _require_playing(state)
    if state.spec.level is not Level.FUNCTION:
        raise IllegalMoveError("parameter editing needs function level")
    if not state.virtual_steps:
        raise NoActiveStepError("no virtual step to edit")
    last = state.virtual_steps[-1]
    if field not in _STEP_FIELDS[type(last)]:
        raise InvalidFieldError(f"step {type(last).__name__} has no field {field!r}")
    if isinstance(last, Translate):
        comps = {"x": last.v.x, "y": last.v.y, "z": last.v.z}
        comps[field] = value
        edited: TransformStep = Translate(Vec3(comps["x"], comps["y"], comps["z"]))
    elif isinstance(last, Rotate):
        edited = Rotate(last.axis, value)
    else:
        edited = Scale(value)
    step_matrix(edited)  # validates the new parameter
    needed = step_controls(edited)
    if not needed <= state.spec.allowed_controls:
        raise IllegalMoveError(f"controls not allowed: {sorted(needed - state.spec.allowed_controls)}")
    steps = state.virtual_steps[:-1] + (edited,)
    virtual = compose(steps)
    event = MoveEvent(len(state.event_log) + 1, Actor.VIRTUAL, EditLastStepParam(field, value), t_ms)
    log = state.event_log + (event,)
    return replace(state,
                   virtual_steps=steps,
                   virtual_matrix=virtual,
                   event_log=log,
                   status=_evaluate_status(state.spec, state.physical_matrix, virtual, log))


def undo(state: GameState, t_ms: int = 0) -> GameState:
    """Drop the last virtual step. Physical moves cannot be undone."""
    _require_playing(state)
    if state.spec.level is Level.MOTION:
        raise IllegalMoveError("virtual moves are locked at motion level")
    if not state.virtual_steps:
        raise NothingToUndoError("no virtual steps to undo")
    steps = state.virtual_steps[:-1]
    virtual = compose(steps)
    event = MoveEvent(len(state.event_log) + 1, Actor.VIRTUAL, Undo(), t_ms)
    log = state.event_log + (event,)
    return replace(state,
                   virtual_steps=steps,
                   virtual_matrix=virtual,
                   event_log=log,
                   status=_evaluate_status(state.spec, state.physical_matrix, virtual, log))


def reset(state: GameState, t_ms: int = 0) -> GameState:
    """Back to the start pose for both models; the event log is retained."""
    event = MoveEvent(len(state.event_log) + 1, Actor.VIRTUAL, Reset(), t_ms)
    log = state.event_log + (event,)
    return replace(state,
                   physical_matrix=IDENTITY,
                   virtual_steps=(),
                   virtual_matrix=IDENTITY,
                   status=Status.PLAYING,
                   event_log=log)


def session_error(state: GameState) -> PoseError:
    """Current virtual-vs-physical mismatch under the spec's weights."""
    return pose_error(state.virtual_matrix, state.physical_matrix, state.spec.weights)


# -- puzzle generation --------------------------------------------------------

_ANGLES = tuple(k * 15.0 for k in range(-12, 13) if k != 0)
_OFFSETS = tuple(k * 0.5 for k in range(-16, 17) if k != 0)
_SCALES = (0.5, 2.0)


def generate_puzzle(seed: int, level: Level, difficulty: int) -> PuzzleSpec:
    """Deterministic puzzle for (seed, level, difficulty).

    Difficulty sets the factor count: 1 = single factor (translation or
    rotation), 2-3 = two factors, 4-5 = all available factors with difficulty
    5 forcing a non-axis-aligned translation. Scale factors only appear at
    function level, where simulated physical scaling is allowed. Angles are
    15-degree multiples, translations half-stud offsets within 8 studs.
    """
    if not 1 <= difficulty <= 5:
        raise InvalidParameterError(f"difficulty must be 1..5, got {difficulty}")
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameterError("seed must fit in 64 unsigned bits")
    rng = random.Random(f"{seed}|{level.value}|{difficulty}")

    scale_ok = level is Level.FUNCTION
    if difficulty == 1:
        factors = {rng.choice("tr")}
    elif difficulty == 2:
        factors = {"t", "r"}
    elif difficulty == 3:
        pairs = [("t", "r"), ("t", "s"), ("r", "s")] if scale_ok else [("t", "r")]
        factors = set(rng.choice(pairs))
    else:
        factors = {"t", "r", "s"} if scale_ok else {"t", "r"}

    if difficulty >= 5:
        translation_axes = rng.choice((2, 3))
    elif difficulty == 4:
        translation_axes = 2
    else:
        translation_axes = 1

    steps: list[TransformStep] = []
    if "s" in factors:
        steps.append(Scale(rng.choice(_SCALES)))
    if "r" in factors:
        steps.append(Rotate(rng.choice(_AXIS_ORDER), rng.choice(_ANGLES)))
    if "t" in factors:
        comps = [0.0, 0.0, 0.0]
        for axis_index in sorted(rng.sample((0, 1, 2), translation_axes)):
            comps[axis_index] = rng.choice(_OFFSETS)
        steps.append(Translate(Vec3(*comps)))

    allowed = frozenset().union(*(step_controls(s) for s in steps))
    spec = PuzzleSpec(
        id=f"{level.value}-d{difficulty}-{seed:016x}",
        level=level,
        target_steps=tuple(steps),
        allowed_controls=allowed,
        tolerance=DEFAULT_TOLERANCE,
        weights=DEFAULT_WEIGHTS,
        seed=seed,
        model_ref="demo",
    )
    validate_spec(spec)
    return spec


# -- replay -------------------------------------------------------------------

def _apply_event(state: GameState, event: MoveEvent) -> GameState:
    action = event.action
    if isinstance(action, ApplyStep):
        if event.actor is Actor.PHYSICAL:
            return apply_physical(state, action.step, event.t_ms)
        return apply_virtual(state, action.step, event.t_ms)
    if isinstance(action, EditLastStepParam):
        return edit_virtual_param(state, action.field, action.value, event.t_ms)
    if isinstance(action, Undo):
        return undo(state, event.t_ms)
    if isinstance(action, Reset):
        return reset(state, event.t_ms)
    raise CorruptLogError(f"unknown action type {type(action).__name__}")


def replay(spec: PuzzleSpec, events: tuple[MoveEvent, ...]) -> GameState:
    """Fold a recorded event list into a fresh session.

    Produces a final state identical to the live session that logged it. An
    illegal event surfaces the original error with its sequence number set.
    """
    state = new_session(spec)
    for index, event in enumerate(events):
        if event.seq != index + 1:
            raise CorruptLogError(
                f"sequence numbers must be contiguous: expected {index + 1}, got {event.seq}",
                line=index + 1)
        try:
            state = _apply_event(state, event)
        except XformError as exc:
            exc.sequence_no = event.seq
            raise
    return state
