from .linalg import sym_eig, thin_qr, matrix_exp, orthogonal_log, fix_signs
from .rng import RngState, make_rng, stage_rng, gaussian_matrix, STREAMS

__all__ = [
    "sym_eig", "thin_qr", "matrix_exp", "orthogonal_log", "fix_signs",
    "RngState", "make_rng", "stage_rng", "gaussian_matrix", "STREAMS",
]
