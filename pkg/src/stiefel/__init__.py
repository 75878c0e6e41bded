from .geometry import (
    project_tangent, project_normal, stiefel_exp, stiefel_log, geodesic_interpolate,
    geodesic_distance, conditional_vector_field, haar_sample,
    tangent_part, normal_part, exp_frame, log_frame, interpolate_frame,
    conditional_field_frame, haar_frame, LOG_TOL, LOG_MAX_ITER,
)

__all__ = [
    "project_tangent", "project_normal", "stiefel_exp", "stiefel_log", "geodesic_interpolate",
    "geodesic_distance", "conditional_vector_field", "haar_sample",
    "tangent_part", "normal_part", "exp_frame", "log_frame", "interpolate_frame",
    "conditional_field_frame", "haar_frame", "LOG_TOL", "LOG_MAX_ITER",
]
