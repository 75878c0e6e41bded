"""Residual MLP vector fields with hand-written reverse-mode gradients.

Block(h) = ReLU(LN1(W2 · ReLU(LN2(W1 · h + b1)) + b2) + h)

Weights are stored (in, out) so a layer is `h @ W + b` over a batch of rows.
The network input is the row [x, t, cond].
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import numpy as np

from ..numerics import RngState
from ..utils import RangeError, ShapeError

LN_EPS = 1e-5

GradientSet = Dict[str, np.ndarray]


def _layer_norm(x: np.ndarray, gain: np.ndarray, shift: np.ndarray):
    mu = x.mean(axis=1, keepdims=True)
    var = x.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv_std
    return xhat * gain + shift, (xhat, inv_std)


def _layer_norm_backward(dy: np.ndarray, gain: np.ndarray, cache):
    xhat, inv_std = cache
    dxhat = dy * gain
    dx = inv_std * (dxhat - dxhat.mean(axis=1, keepdims=True)
                    - xhat * (dxhat * xhat).mean(axis=1, keepdims=True))
    return dx, (dy * xhat).sum(axis=0), dy.sum(axis=0)


@dataclass
class VectorFieldNet:
    """Time- (and optionally eigenvalue-) conditioned vector field R^d -> R^d'."""
    input_dim: int
    output_dim: int
    hidden_dim: int
    num_blocks: int
    cond_dim: int = 0
    params: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not self.params:
            return
        expected = self.param_shapes()
        if set(expected) != set(self.params):
            raise ShapeError(f"parameter names {sorted(self.params)} do not match the architecture")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeError(f"parameter {name} has shape {self.params[name].shape}, expected {shape}")
            if not np.all(np.isfinite(self.params[name])):
                raise ShapeError(f"parameter {name} has non-finite entries")

    @classmethod
    def create(cls, input_dim: int, output_dim: int, hidden_dim: int, num_blocks: int,
               rng: RngState, cond_dim: int = 0, zero_output: bool = True) -> "VectorFieldNet":
        """Fan-in uniform weights, zero biases, unit LN gains.

        With `zero_output` the output layer starts at zero, so the initial
        field is identically zero.
        """
        net = cls(input_dim, output_dim, hidden_dim, num_blocks, cond_dim)
        params = {}
        for name, shape in net.param_shapes().items():
            leaf = name.rsplit(".", 1)[-1]
            if leaf == "g":
                params[name] = np.ones(shape)
            elif leaf.startswith("W") and not (zero_output and name.startswith("out.")):
                bound = 1.0 / np.sqrt(shape[0])
                params[name] = rng.uniform(-bound, bound, size=shape)
            else:
                params[name] = np.zeros(shape)
        net.params = params
        return net

    @property
    def in_features(self) -> int:
        return self.input_dim + 1 + self.cond_dim

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        H = self.hidden_dim
        shapes = {"in.W": (self.in_features, H), "in.b": (H,)}
        for i in range(self.num_blocks):
            p = f"blocks.{i}."
            shapes.update({
                p + "W1": (H, H), p + "b1": (H,), p + "ln2.g": (H,), p + "ln2.b": (H,),
                p + "W2": (H, H), p + "b2": (H,), p + "ln1.g": (H,), p + "ln1.b": (H,),
            })
        shapes.update({"out.W": (H, self.output_dim), "out.b": (self.output_dim,)})
        return shapes

    def param_names(self) -> List[str]:
        return list(self.param_shapes())

    def num_parameters(self) -> int:
        return int(sum(np.prod(s) for s in self.param_shapes().values()))

    def copy(self) -> "VectorFieldNet":
        return VectorFieldNet(self.input_dim, self.output_dim, self.hidden_dim, self.num_blocks,
                              self.cond_dim, {k: v.copy() for k, v in self.params.items()})

    def _inputs(self, x, t, cond) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        B = x.shape[0]
        if x.shape[1] != self.input_dim:
            raise ShapeError(f"input has {x.shape[1]} features, network expects {self.input_dim}")
        t = np.broadcast_to(np.asarray(t, dtype=np.float64).reshape(-1), (B,))
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise RangeError("flow time must lie in [0, 1]")
        parts = [x, t[:, None]]
        if self.cond_dim:
            if cond is None:
                raise ShapeError(f"network expects a conditioning vector of length {self.cond_dim}")
            c = np.atleast_2d(np.asarray(cond, dtype=np.float64))
            if c.shape[1] != self.cond_dim:
                raise ShapeError(f"conditioning has {c.shape[1]} entries, expected {self.cond_dim}")
            parts.append(np.broadcast_to(c, (B, self.cond_dim)))
        elif cond is not None and np.size(cond):
            raise ShapeError("unconditioned network received a conditioning vector")
        return np.hstack(parts)

    def forward(self, x, t, cond=None, keep_cache: bool = False):
        """Batched evaluation: x is (B, input_dim) or (input_dim,); t scalar or (B,)."""
        P = self.params
        z = self._inputs(x, t, cond)
        h = z @ P["in.W"] + P["in.b"]
        caches = []
        for i in range(self.num_blocks):
            p = f"blocks.{i}."
            a1 = h @ P[p + "W1"] + P[p + "b1"]
            n2, ln2 = _layer_norm(a1, P[p + "ln2.g"], P[p + "ln2.b"])
            r = np.maximum(n2, 0.0)
            a2 = r @ P[p + "W2"] + P[p + "b2"]
            n1, ln1 = _layer_norm(a2, P[p + "ln1.g"], P[p + "ln1.b"])
            s = n1 + h
            caches.append((h, n2, ln2, r, ln1, s))
            h = np.maximum(s, 0.0)
        out = h @ P["out.W"] + P["out.b"]
        if keep_cache:
            return out, (z, caches, h)
        return out

    def backward(self, cache, upstream: np.ndarray) -> GradientSet:
        """Gradients of Σ_b ⟨upstream_b, out_b⟩ with respect to every parameter."""
        P = self.params
        z, caches, h = cache
        upstream = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
        if upstream.shape != (h.shape[0], self.output_dim):
            raise ShapeError(f"upstream shape {upstream.shape} does not match output {(h.shape[0], self.output_dim)}")
        grads: GradientSet = {"out.W": h.T @ upstream, "out.b": upstream.sum(axis=0)}
        dh = upstream @ P["out.W"].T
        for i in reversed(range(self.num_blocks)):
            p = f"blocks.{i}."
            h_in, n2, ln2, r, ln1, s = caches[i]
            ds = dh * (s > 0)
            da2, grads[p + "ln1.g"], grads[p + "ln1.b"] = _layer_norm_backward(ds, P[p + "ln1.g"], ln1)
            grads[p + "W2"] = r.T @ da2
            grads[p + "b2"] = da2.sum(axis=0)
            dn2 = (da2 @ P[p + "W2"].T) * (n2 > 0)
            da1, grads[p + "ln2.g"], grads[p + "ln2.b"] = _layer_norm_backward(dn2, P[p + "ln2.g"], ln2)
            grads[p + "W1"] = h_in.T @ da1
            grads[p + "b1"] = da1.sum(axis=0)
            dh = da1 @ P[p + "W1"].T + ds
        grads["in.W"] = z.T @ dh
        grads["in.b"] = dh.sum(axis=0)
        return grads


def net_forward(net: VectorFieldNet, x, t: float, cond=None) -> np.ndarray:
    """Single-input evaluation; returns a vector of length output_dim."""
    return net.forward(x, t, cond)[0]


def net_gradients(net: VectorFieldNet, x, t: float, cond=None, upstream=None) -> GradientSet:
    """Exact reverse-mode gradients of ⟨upstream, net_forward(net, x, t, cond)⟩."""
    _, cache = net.forward(x, t, cond, keep_cache=True)
    return net.backward(cache, np.asarray(upstream, dtype=np.float64).reshape(1, -1))
