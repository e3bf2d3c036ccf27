"""Complex cross-correlation of affinity fields: direct scores and FFT sweeps."""

from .landscape import (
    ScoreLandscape,
    correlate,
    global_top_k,
    landscape_sweep,
    resample_rotated,
    translation_landscape,
    write_top_k,
)
from .pose import Pose, n_dof, quat_angle, rotation_error, translation_error
from .rotations import sample_rotations, super_fibonacci
from .score import IncompatibleFieldsError, interp_points, make_score_fn, real_score, score_direct

__all__ = [
    "IncompatibleFieldsError", "Pose", "ScoreLandscape", "correlate", "global_top_k",
    "interp_points", "landscape_sweep", "make_score_fn", "n_dof", "quat_angle", "real_score",
    "resample_rotated", "rotation_error", "sample_rotations", "score_direct",
    "super_fibonacci", "translation_error", "translation_landscape", "write_top_k",
]
