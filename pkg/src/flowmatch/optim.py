from dataclasses import dataclass, field
from typing import Dict, Tuple
import numpy as np

from ..utils import ShapeError

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adamw_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamState,
               lr: float, weight_decay: float) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One AdamW update (decoupled weight decay, bias-corrected moments).

    Pure: returns new parameter and state objects, inputs are not modified.
    """
    if set(params) != set(grads):
        raise ShapeError("gradient names do not match parameter names")
    step = state.step + 1
    c1 = 1.0 - BETA1 ** step
    c2 = 1.0 - BETA2 ** step
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient {name} has shape {g.shape}, parameter has {p.shape}")
        m = BETA1 * state.m.get(name, np.zeros_like(p)) + (1.0 - BETA1) * g
        v = BETA2 * state.v.get(name, np.zeros_like(p)) + (1.0 - BETA2) * g * g
        decayed = p * (1.0 - lr * weight_decay)
        new_params[name] = decayed - lr * (m / c1) / (np.sqrt(v / c2) + ADAM_EPS)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(step=step, m=new_m, v=new_v)


class AdamW:
    """Stateful wrapper around adamw_step for a training loop."""

    def __init__(self, lr: float, weight_decay: float = 0.01):
        self.lr = lr
        self.weight_decay = weight_decay
        self.state = AdamState()

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        new_params, self.state = adamw_step(params, grads, self.state, self.lr, self.weight_decay)
        return new_params
