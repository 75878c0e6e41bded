from .network import VectorFieldNet, GradientSet, net_forward, net_gradients
from .losses import cfm_loss_euclidean, cfm_loss_stiefel, straight_line_target, geodesic_pair
from .optim import AdamW, AdamState, adamw_step
from .sampling import (
    SFMGModel, euler_sample_euclidean, euler_sample_stiefel, integrate_euclidean, integrate_stiefel,
    sfmg_sample, noise_fm_sample, refine_laplacian, sample_eigenvalues, sample_eigenvectors,
    generate_graphs, num_steps,
)
from .trainers import (
    BaseFlowTrainer, EigenvalueTrainer, EigenvectorTrainer, PostprocessTrainer, NoiseFMTrainer,
    train_eigenvalues, train_eigenvectors, train_postprocess, noise_fm_baseline,
)

__all__ = [
    "VectorFieldNet", "GradientSet", "net_forward", "net_gradients",
    "cfm_loss_euclidean", "cfm_loss_stiefel", "straight_line_target", "geodesic_pair",
    "AdamW", "AdamState", "adamw_step",
    "SFMGModel", "euler_sample_euclidean", "euler_sample_stiefel", "integrate_euclidean",
    "integrate_stiefel", "sfmg_sample", "noise_fm_sample", "refine_laplacian",
    "sample_eigenvalues", "sample_eigenvectors", "generate_graphs", "num_steps",
    "BaseFlowTrainer", "EigenvalueTrainer", "EigenvectorTrainer", "PostprocessTrainer", "NoiseFMTrainer",
    "train_eigenvalues", "train_eigenvectors", "train_postprocess", "noise_fm_baseline",
]
