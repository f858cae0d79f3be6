from __future__ import annotations

import random

import pytest

from conftest import assert_mat_close
from xformplay import (
    DEFAULT_TOLERANCE,
    DEFAULT_WEIGHTS,
    IDENTITY,
    Actor,
    ApplyStep,
    GameState,
    Level,
    MoveEvent,
    PuzzleSpec,
    Reset,
    Rotate,
    RotationAxis,
    Scale,
    Status,
    Translate,
    Undo,
    Vec3,
    apply_physical,
    apply_physical_target,
    apply_virtual,
    compose,
    edit_virtual_param,
    generate_puzzle,
    is_aligned,
    new_session,
    replay,
    reset,
    rotation_matrix,
    step_matrix,
    suggest_hint,
    translation_matrix,
    undo,
    validate_spec,
)
from xformplay.engine import step_controls
from xformplay.errors import (
    CorruptLogError,
    IllegalMoveError,
    InvalidFieldError,
    InvalidSpecError,
    NoActiveStepError,
    NothingToUndoError,
    SessionFinishedError,
)


def make_spec(target, controls=None, level=Level.FUNCTION, **kw) -> PuzzleSpec:
    if controls is None:
        controls = frozenset().union(*(step_controls(s) for s in target)) or frozenset()
    return PuzzleSpec(id="test", level=level, target_steps=tuple(target),
                      allowed_controls=frozenset(controls), **kw)


# -- session start -----------------------------------------------------------------

def test_new_session_starts_with_identities():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    assert state.physical_matrix == IDENTITY
    assert state.virtual_matrix == IDENTITY
    assert state.status is Status.PLAYING
    assert state.event_log == ()
    assert state.move_count == 0


def test_new_session_rejects_insufficient_controls():
    spec = make_spec([Rotate(RotationAxis.Z, 90.0)], controls={"translate_x"})
    with pytest.raises(InvalidSpecError):
        new_session(spec)


def test_aligned_start_is_not_a_win():
    # both matrices identity means aligned, but nothing has happened yet
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    assert is_aligned(state.virtual_matrix, state.physical_matrix, state.spec.tolerance)
    assert state.status is Status.PLAYING


# -- physical moves -------------------------------------------------------------------

def test_apply_physical_moves_only_physical():
    state = new_session(make_spec([Translate(Vec3(3, 0, 0))]))
    state = apply_physical(state, Translate(Vec3(3, 0, 0)))
    assert state.physical_matrix == translation_matrix(Vec3(3, 0, 0))
    assert state.virtual_matrix == IDENTITY


def test_apply_physical_left_multiplies():
    state = new_session(make_spec([Translate(Vec3(1, 0, 0))]))
    state = apply_physical(state, Rotate(RotationAxis.Z, 90.0))
    state = apply_physical(state, Translate(Vec3(1, 0, 0)))
    expected = translation_matrix(Vec3(1, 0, 0)) @ rotation_matrix(RotationAxis.Z, 90.0)
    assert state.physical_matrix == expected


def test_apply_physical_target_matches_compose():
    rng = random.Random(4)
    for _ in range(20):
        spec = generate_puzzle(rng.getrandbits(64), Level.FUNCTION, 5)
        state = apply_physical_target(new_session(spec))
        assert state.physical_matrix == compose(spec.target_steps)


def test_physical_scale_needs_function_level():
    spec = make_spec([Translate(Vec3(1, 0, 0))], level=Level.MAPPING)
    state = new_session(spec)
    with pytest.raises(IllegalMoveError):
        apply_physical(state, Scale(2.0))
    fn = new_session(make_spec([Translate(Vec3(1, 0, 0))], level=Level.FUNCTION))
    assert apply_physical(fn, Scale(2.0)).physical_matrix == step_matrix(Scale(2.0))


def test_returning_physical_model_to_start_counts_as_aligned_win():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_physical(state, Translate(Vec3(3, 0, 0)))
    assert state.status is Status.PLAYING
    state = apply_physical(state, Translate(Vec3(-3, 0, 0)))
    assert state.status is Status.SOLVED


# -- virtual moves ---------------------------------------------------------------------

def test_virtual_solve_simple_translation():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_physical_target(state)
    state = apply_virtual(state, Translate(Vec3(2, 0, 0)))
    assert state.status is Status.SOLVED
    assert state.move_count == 1


def test_virtual_solve_within_tolerance():
    state = new_session(make_spec([Rotate(RotationAxis.Z, 90.0)]))
    state = apply_physical_target(state)
    state = apply_virtual(state, Rotate(RotationAxis.Z, 89.0))
    assert state.status is Status.SOLVED  # 1 degree off, tolerance is 2


def test_virtual_solve_two_factor_target():
    spec = make_spec([Scale(2.0), Rotate(RotationAxis.Z, 90.0)])
    state = apply_physical_target(new_session(spec))
    state = apply_virtual(state, Rotate(RotationAxis.Z, 90.0))
    assert state.status is Status.PLAYING
    state = apply_virtual(state, Scale(2.0))
    assert state.status is Status.SOLVED


def test_virtual_rejects_disallowed_control():
    spec = make_spec([Translate(Vec3(2, 0, 0))], controls={"translate_x"})
    state = apply_physical_target(new_session(spec))
    with pytest.raises(IllegalMoveError):
        apply_virtual(state, Translate(Vec3(0, 1, 0)))
    # zero components exercise no control, so this stays legal
    state = apply_virtual(state, Translate(Vec3(2, 0.0, 0.0)))
    assert state.status is Status.SOLVED


def test_moves_after_solve_are_rejected():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_physical_target(state)
    state = apply_virtual(state, Translate(Vec3(2, 0, 0)))
    with pytest.raises(SessionFinishedError):
        apply_virtual(state, Translate(Vec3(1, 0, 0)))
    with pytest.raises(SessionFinishedError):
        apply_physical(state, Translate(Vec3(1, 0, 0)))


def test_motion_level_locks_virtual_interaction():
    spec = make_spec([Translate(Vec3(1, 0, 0))], level=Level.MOTION)
    state = apply_physical_target(new_session(spec))
    with pytest.raises(IllegalMoveError):
        apply_virtual(state, Translate(Vec3(1, 0, 0)))
    with pytest.raises(IllegalMoveError):
        undo(state)


# -- parameter edits ----------------------------------------------------------------------

def test_edit_translate_component():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_virtual(state, Translate(Vec3(1, 0, 0)))
    state = edit_virtual_param(state, "x", 2.0)
    assert state.virtual_matrix.column4() == Vec3(2, 0, 0)
    assert len(state.virtual_steps) == 1


def test_edit_rotation_angle_recomposes():
    spec = make_spec([Rotate(RotationAxis.Z, 90.0), Translate(Vec3(1, 0, 0))])
    state = new_session(spec)
    state = apply_virtual(state, Translate(Vec3(1, 0, 0)))
    state = apply_virtual(state, Rotate(RotationAxis.Z, 30.0))
    state = edit_virtual_param(state, "angle", 90.0)
    expected = compose((Translate(Vec3(1, 0, 0)), Rotate(RotationAxis.Z, 90.0)))
    assert state.virtual_matrix == expected


def test_slider_drag_is_one_step_many_edits():
    state = new_session(make_spec([Rotate(RotationAxis.Z, 45.0)]))
    state = apply_virtual(state, Rotate(RotationAxis.Z, 10.0))
    for value in (10.0, 20.0, 45.0):
        state = edit_virtual_param(state, "angle", value)
    assert len(state.virtual_steps) == 1
    assert state.virtual_steps[0] == Rotate(RotationAxis.Z, 45.0)
    edits = [ev for ev in state.event_log if not isinstance(ev.action, ApplyStep)]
    assert len(edits) == 3


def test_edit_error_cases():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    with pytest.raises(NoActiveStepError):
        edit_virtual_param(state, "x", 1.0)
    state = apply_virtual(state, Translate(Vec3(1, 0, 0)))
    with pytest.raises(InvalidFieldError):
        edit_virtual_param(state, "angle", 30.0)


def test_edit_needs_function_level():
    spec = make_spec([Translate(Vec3(2, 0, 0))], level=Level.MAPPING)
    state = new_session(spec)
    state = apply_virtual(state, Translate(Vec3(1, 0, 0)))
    with pytest.raises(IllegalMoveError):
        edit_virtual_param(state, "x", 2.0)


# -- undo / reset ------------------------------------------------------------------------------

def test_undo_removes_last_step():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_virtual(state, Translate(Vec3(2, 0, 0)))
    state = undo(state)
    assert state.virtual_matrix == IDENTITY
    with pytest.raises(NothingToUndoError):
        undo(state)


def test_undo_then_reapply_is_bit_identical():
    state = new_session(make_spec([Rotate(RotationAxis.Y, 75.0), Translate(Vec3(1, 2, 0))]))
    state = apply_virtual(state, Rotate(RotationAxis.Y, 75.0))
    state = apply_virtual(state, Translate(Vec3(1, 2, 0)))
    before = state.virtual_matrix
    state = undo(state)
    state = apply_virtual(state, Translate(Vec3(1, 2, 0)))
    assert state.virtual_matrix == before  # exact tuple equality


def test_reset_restores_start_but_keeps_log():
    state = new_session(make_spec([Translate(Vec3(2, 0, 0))]))
    state = apply_physical_target(state)
    state = apply_virtual(state, Translate(Vec3(1, 0, 0)))
    events_before = len(state.event_log)
    state = reset(state)
    assert state.physical_matrix == IDENTITY
    assert state.virtual_matrix == IDENTITY
    assert state.status is Status.PLAYING
    assert len(state.event_log) == events_before + 1
    # a solved session can be reset and replayed
    state = apply_physical_target(state)
    state = apply_virtual(state, Translate(Vec3(2, 0, 0)))
    assert state.status is Status.SOLVED
    assert reset(state).status is Status.PLAYING


def test_state_invariant_virtual_matrix_matches_steps():
    state = new_session(make_spec([Scale(2.0), Rotate(RotationAxis.X, 30.0),
                                   Translate(Vec3(1, 0, 2))]))
    rng = random.Random(8)
    state = apply_physical_target(state)
    for _ in range(10):
        roll = rng.random()
        try:
            if roll < 0.5:
                state = apply_virtual(state, Rotate(RotationAxis.X, rng.uniform(-180, 180)))
            elif roll < 0.7 and state.virtual_steps:
                state = edit_virtual_param(state, "angle", rng.uniform(-180, 180)) \
                    if isinstance(state.virtual_steps[-1], Rotate) else state
            elif roll < 0.85 and state.virtual_steps:
                state = undo(state)
            else:
                state = reset(state)
                state = apply_physical_target(state)
        except SessionFinishedError:
            break
        assert state.virtual_matrix == compose(state.virtual_steps)


# -- generator ----------------------------------------------------------------------------------

def test_generator_is_deterministic():
    a = generate_puzzle(7, Level.FUNCTION, 3)
    b = generate_puzzle(7, Level.FUNCTION, 3)
    assert a == b
    assert generate_puzzle(8, Level.FUNCTION, 3) != a


def test_generator_difficulty_one_has_single_factor():
    from xformplay import decompose_trs
    import math
    for seed in range(200):
        spec = generate_puzzle(seed, Level.FUNCTION, 1)
        dec = decompose_trs(compose(spec.target_steps))
        factors = sum((
            dec.translation.norm() > 1e-12,
            dec.angle > 1e-9,
            abs(math.log(dec.scale)) > 1e-12,
        ))
        assert factors == 1, spec


def test_generator_difficulty_five_has_all_factors():
    from xformplay import decompose_trs
    import math
    for seed in range(200):
        spec = generate_puzzle(seed, Level.FUNCTION, 5)
        dec = decompose_trs(compose(spec.target_steps))
        assert dec.translation.norm() > 1e-12
        assert dec.angle > 1e-9
        assert abs(math.log(dec.scale)) > 1e-12
        nonzero = sum(1 for c in dec.translation.to_tuple() if c != 0.0)
        assert nonzero >= 2  # non-axis-aligned translation


def test_generator_never_scales_outside_function_level():
    for level in (Level.MOTION, Level.MAPPING):
        for seed in range(100):
            spec = generate_puzzle(seed, level, 5)
            assert not any(isinstance(s, Scale) for s in spec.target_steps)


def test_generated_puzzles_validate():
    for difficulty in range(1, 6):
        for seed in range(50):
            validate_spec(generate_puzzle(seed, Level.FUNCTION, difficulty))


def test_hint_sequence_solves_generated_puzzles():
    rng = random.Random(2)
    for difficulty in range(1, 6):
        for _ in range(20):
            spec = generate_puzzle(rng.getrandbits(64), Level.FUNCTION, difficulty)
            state = apply_physical_target(new_session(spec))
            hints = 0
            while state.status is Status.PLAYING and hints < 4:
                hint = suggest_hint(state.virtual_matrix, state.physical_matrix,
                                    spec.weights, spec.tolerance)
                state = apply_virtual(state, hint.suggested_step)
                hints += 1
            assert state.status is Status.SOLVED
            assert hints <= 3


# -- replay ---------------------------------------------------------------------------------------

def play_scripted_session() -> GameState:
    spec = make_spec([Scale(2.0), Rotate(RotationAxis.Z, 90.0), Translate(Vec3(1, 2, 0))])
    state = new_session(spec)
    state = apply_physical_target(state, t_ms=5)
    state = apply_virtual(state, Rotate(RotationAxis.Z, 15.0), t_ms=20)
    state = edit_virtual_param(state, "angle", -15.0, t_ms=30)
    state = undo(state, t_ms=40)
    while state.status is Status.PLAYING:
        hint = suggest_hint(state.virtual_matrix, state.physical_matrix,
                            spec.weights, spec.tolerance)
        state = apply_virtual(state, hint.suggested_step, t_ms=50)
    return state


def test_replay_empty_log_is_fresh_session():
    spec = generate_puzzle(3, Level.FUNCTION, 2)
    assert replay(spec, ()) == new_session(spec)


def test_replay_reproduces_live_session():
    live = play_scripted_session()
    again = replay(live.spec, live.event_log)
    assert again == live  # field-for-field, bit-for-bit


def test_replay_rejects_sequence_gap():
    spec = generate_puzzle(3, Level.FUNCTION, 1)
    events = (
        MoveEvent(1, Actor.PHYSICAL, ApplyStep(spec.target_steps[0]), 0),
        MoveEvent(2, Actor.VIRTUAL, ApplyStep(spec.target_steps[0]), 0),
        MoveEvent(4, Actor.VIRTUAL, Undo(), 0),
    )
    with pytest.raises(CorruptLogError) as info:
        replay(spec, events)
    assert info.value.line == 3


def test_replay_halts_with_original_error_and_sequence():
    spec = make_spec([Translate(Vec3(1, 0, 0))], level=Level.MOTION)
    events = (
        MoveEvent(1, Actor.PHYSICAL, ApplyStep(Translate(Vec3(1, 0, 0))), 0),
        MoveEvent(2, Actor.VIRTUAL, ApplyStep(Translate(Vec3(1, 0, 0))), 0),
    )
    with pytest.raises(IllegalMoveError) as info:
        replay(spec, events)
    assert info.value.sequence_no == 2
