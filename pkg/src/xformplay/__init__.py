"""xformplay: a transformation-puzzle workbench.

Move a simulated brick model, then reconstruct the motion on a virtual
wireframe by composing 4x4 matrices step by step.
"""

from .errors import XformError
from .xform import (
    IDENTITY,
    Mat4,
    MulExpansion,
    Rotate,
    RotationAxis,
    Scale,
    TransformStep,
    Translate,
    Vec3,
    apply_point,
    compose,
    invert,
    multiply_expansion,
    normalize_degrees,
    rotation_matrix,
    scale_matrix,
    step_matrix,
    translation_matrix,
)
from .solver import (
    DEFAULT_TOLERANCE,
    DEFAULT_WEIGHTS,
    ErrorWeights,
    Hint,
    PointCorrespondences,
    PoseDecomposition,
    PoseError,
    RigidAlignment,
    alignment_delta,
    decompose_trs,
    is_aligned,
    kabsch_align,
    pose_error,
    rotation_angle_between,
    suggest_hint,
)
from .engine import (
    Actor,
    ApplyStep,
    EditLastStepParam,
    GameState,
    Level,
    MoveEvent,
    PuzzleSpec,
    Reset,
    Status,
    Undo,
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
    validate_spec,
)
from .scene import (
    Brick,
    BrickModel,
    build_annotations,
    demo_model,
    mapped_points,
    matrix_panel,
    wireframe_edges,
)
from .formats import (
    ENGINE_VERSION,
    EventLogWriter,
    PuzzleFile,
    SceneSnapshot,
    load_puzzle,
    read_log,
    save_puzzle,
    snapshot,
    snapshot_to_json,
)

__version__ = ENGINE_VERSION
