"""Training stages.

Each stage is a strategy over a shared loop (`BaseFlowTrainer.fit`): it
builds its network and produces the loss and gradients of one batch. Every
stage draws from its own RNG streams, so a stage is a pure function of
(dataset, config, seed) and of the frozen upstream networks it consumes.
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple
import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..graphs import pad_graph, reconstruct_laplacian
from ..models import Graph, SpectralData, TrainConfig
from ..numerics import RngState, stage_rng
from ..stiefel import haar_frame
from ..utils import DatasetError, NumericalError, RangeError, ShapeError, TrainingTracker, logger
from .losses import cfm_loss_euclidean, geodesic_pair, regression_loss, stiefel_regression_loss, straight_line_target
from .network import GradientSet, VectorFieldNet
from .optim import AdamW
from .sampling import sample_eigenvalues, sample_eigenvectors

MAX_RESAMPLES = 5
DEFAULT_POOL_SIZE = 256
DEFAULT_POOL_REFRESH = 0  # never redraw

INIT_STREAM = 0
BATCH_STREAM = 1


class BaseFlowTrainer(ABC):
    """Shared optimization loop: one AdamW step per batch, losses logged to the tracker."""
    stage: str = ""

    def __init__(self, cfg: TrainConfig, tracker: Optional[TrainingTracker] = None):
        self.cfg = cfg
        self.tracker = tracker if tracker is not None else TrainingTracker()
        self.rng = stage_rng(cfg.seed, self.stage, BATCH_STREAM)
        self.skipped_total = 0

    @abstractmethod
    def build_net(self, rng: RngState) -> VectorFieldNet:
        pass

    @abstractmethod
    def batch_loss(self, net: VectorFieldNet) -> Tuple[float, GradientSet, int]:
        """Loss and gradients of one batch, plus the number of samples dropped from it."""
        pass

    def fit(self) -> VectorFieldNet:
        net = self.build_net(stage_rng(self.cfg.seed, self.stage, INIT_STREAM))
        optimizer = AdamW(self.cfg.learning_rate, self.cfg.weight_decay)
        logger.info("Training started", stage=self.stage, steps=self.cfg.steps,
                    batch_size=self.cfg.batch_size, parameters=net.num_parameters())
        for step in range(1, self.cfg.steps + 1):
            self.before_step(step)
            loss, grads, skipped = self.batch_loss(net)
            self.skipped_total += skipped
            if grads is not None:
                net.params = optimizer.step(net.params, grads)
            self.tracker.log_step(self.stage, step, loss, skipped)
            if step % self.cfg.log_every == 0:
                logger.info("Training progress", stage=self.stage, step=step, loss=loss)
        means = self.tracker.window_means(self.stage)
        logger.info("Training finished", stage=self.stage, skipped=self.skipped_total, **means)
        return net

    def before_step(self, step: int):
        """Hook run ahead of every optimization step."""

    def _times(self, size: int) -> np.ndarray:
        return self.rng.uniform(0.0, 1.0, size=size)

    def _indices(self, population: int) -> np.ndarray:
        return self.rng.integers(0, population, size=self.cfg.batch_size)


def _require_spectra(dataset: List[SpectralData], k: int) -> Tuple[np.ndarray, np.ndarray]:
    if not dataset:
        raise DatasetError("training set is empty")
    shapes = {s.frame.shape for s in dataset}
    if len(shapes) != 1:
        raise ShapeError(f"spectra have mixed frame shapes {sorted(shapes)}; pad graphs to n_max first")
    if dataset[0].k != k:
        raise ShapeError(f"spectra have k={dataset[0].k}, config has k={k}")
    return np.stack([s.lambdas for s in dataset]), np.stack([s.frame for s in dataset])


class EigenvalueTrainer(BaseFlowTrainer):
    """Straight-line flow from N(0, I_k) to the data eigenvalues."""
    stage = "eigenvalues"

    def __init__(self, dataset: List[SpectralData], cfg: TrainConfig, tracker: Optional[TrainingTracker] = None):
        super().__init__(cfg, tracker)
        self.lambdas, _ = _require_spectra(dataset, cfg.k)

    def build_net(self, rng: RngState) -> VectorFieldNet:
        k = self.cfg.k
        return VectorFieldNet.create(k, k, self.cfg.hidden_dim, self.cfg.num_blocks, rng)

    def batch_loss(self, net: VectorFieldNet):
        x1 = self.lambdas[self._indices(len(self.lambdas))]
        x0 = self.rng.standard_normal(x1.shape)
        loss, grads = cfm_loss_euclidean(net, x0, x1, self._times(len(x1)))
        return loss, grads, 0


class EigenvectorTrainer(BaseFlowTrainer):
    """Geodesic flow from Haar noise to the data frames, conditioned on the true eigenvalues.

    A noise endpoint whose logarithm fails to converge is redrawn up to
    MAX_RESAMPLES times; after that the sample is dropped from its batch.
    """
    stage = "eigenvectors"

    def __init__(self, dataset: List[SpectralData], cfg: TrainConfig, tracker: Optional[TrainingTracker] = None):
        super().__init__(cfg, tracker)
        self.lambdas, self.frames = _require_spectra(dataset, cfg.k)
        self.n = self.frames.shape[1]
        self.resampled_total = 0

    def build_net(self, rng: RngState) -> VectorFieldNet:
        nk = self.n * self.cfg.k
        return VectorFieldNet.create(nk, nk, self.cfg.hidden_dim, self.cfg.num_blocks, rng, cond_dim=self.cfg.k)

    def draw_pair(self, U1: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """(U_t, u_t) for a fresh Haar endpoint; raises NumericalError once retries run out."""
        for attempt in Retrying(stop=stop_after_attempt(MAX_RESAMPLES),
                                retry=retry_if_exception_type(NumericalError), reraise=True):
            with attempt:
                if attempt.retry_state.attempt_number > 1:
                    self.resampled_total += 1
                return geodesic_pair(haar_frame(self.n, self.cfg.k, self.rng), U1, t)

    def batch_loss(self, net: VectorFieldNet):
        idx = self._indices(len(self.frames))
        times = self._times(len(idx))
        frames, targets, kept, t_kept = [], [], [], []
        for i, t in zip(idx, times):
            try:
                Ut, ut = self.draw_pair(self.frames[i], float(t))
            except NumericalError as e:
                logger.warning("Dropping eigenvector sample", stage=self.stage, error=str(e))
                continue
            frames.append(Ut)
            targets.append(ut)
            kept.append(i)
            t_kept.append(t)
        skipped = len(idx) - len(kept)
        if not kept:
            return float("nan"), None, skipped
        loss, grads = stiefel_regression_loss(net, np.stack(frames), np.asarray(t_kept),
                                              np.stack(targets), cond=self.lambdas[kept])
        return loss, grads, skipped

    def fit(self) -> VectorFieldNet:
        net = super().fit()
        if self.resampled_total:
            logger.info("Noise endpoints resampled", stage=self.stage, resampled=self.resampled_total)
        return net


class _AdjacencyFlowTrainer(BaseFlowTrainer):
    """Straight-line flow on flattened [adjacency, features] states of padded graphs."""

    def __init__(self, dataset: List[Graph], cfg: TrainConfig, n_max: Optional[int] = None,
                 tracker: Optional[TrainingTracker] = None):
        super().__init__(cfg, tracker)
        if not dataset:
            raise DatasetError("training set is empty")
        self.n = n_max if n_max is not None else max(g.n for g in dataset)
        padded = [pad_graph(g, self.n) for g in dataset]
        dims = {g.features.shape[1] if g.features is not None else 0 for g in padded}
        if len(dims) != 1:
            raise ShapeError("graphs disagree on the node feature dimension")
        self.feature_dim = dims.pop()
        self.targets = np.stack([self._state(g) for g in padded])

    def _state(self, g: Graph) -> np.ndarray:
        parts = [g.adjacency.astype(np.float64).reshape(-1)]
        if self.feature_dim:
            parts.append(g.features.reshape(-1))
        return np.concatenate(parts)

    @property
    def state_dim(self) -> int:
        return self.n * self.n + self.n * self.feature_dim

    def build_net(self, rng: RngState) -> VectorFieldNet:
        d = self.state_dim
        return VectorFieldNet.create(d, d, self.cfg.hidden_dim, self.cfg.num_blocks, rng)

    @abstractmethod
    def initial_adjacency(self, count: int) -> np.ndarray:
        """(count, n*n) starting points of the adjacency part of the flow."""

    def batch_loss(self, net: VectorFieldNet):
        x1 = self.targets[self._indices(len(self.targets))]
        B = len(x1)
        parts = [self.initial_adjacency(B)]
        if self.feature_dim:
            parts.append(self.rng.standard_normal((B, self.n * self.feature_dim)))
        x0 = np.hstack(parts)
        t = self._times(B)
        xt, target = straight_line_target(x0, x1, t)
        loss, grads = regression_loss(net, xt, t, target)
        return loss, grads, 0


class PostprocessTrainer(_AdjacencyFlowTrainer):
    """Flow from reconstructed Laplacians U diag(Λ) Uᵀ of frozen upstream samples to data adjacencies.

    The upstream generators are sampled into a pool of `pool_size`
    Laplacians; every batch draws its starting points from that pool. With
    `pool_refresh` > 0 the pool is redrawn from the same stream every
    `pool_refresh` steps; `pool_refresh=1` gives fresh upstream samples at
    every step.
    """
    stage = "postprocess"

    def __init__(self, dataset: List[Graph], eigval_net: VectorFieldNet, eigvec_net: VectorFieldNet,
                 cfg: TrainConfig, n_max: Optional[int] = None, pool_size: int = DEFAULT_POOL_SIZE,
                 tracker: Optional[TrainingTracker] = None, pool_refresh: int = DEFAULT_POOL_REFRESH):
        super().__init__(dataset, cfg, n_max, tracker)
        if pool_size < 1 or pool_refresh < 0:
            raise RangeError(f"pool_size must be positive and pool_refresh non-negative, "
                             f"got {pool_size} and {pool_refresh}")
        if eigvec_net.input_dim != self.n * cfg.k:
            raise ShapeError(f"eigenvector network generates {eigvec_net.input_dim} entries, "
                             f"expected n_max*k = {self.n * cfg.k}")
        self.eigval_net, self.eigvec_net = eigval_net, eigvec_net
        self.pool_size, self.pool_refresh = pool_size, pool_refresh
        self.pool_rng = stage_rng(cfg.seed, "pool")
        self.pool_draws = 0
        self.pool = self._build_pool()

    def _build_pool(self) -> np.ndarray:
        size, rng = self.pool_size, self.pool_rng
        pool = np.empty((size, self.n * self.n))
        for i in range(size):
            lambdas = sample_eigenvalues(self.eigval_net, self.cfg.k, rng, self.cfg.epsilon)
            U = sample_eigenvectors(self.eigvec_net, self.n, lambdas, rng, self.cfg.epsilon)
            pool[i] = reconstruct_laplacian(SpectralData(self.cfg.k, lambdas, U)).reshape(-1)
        self.pool_draws += 1
        if self.pool_draws == 1 or self.pool_draws % 100 == 0:
            logger.info("Upstream pool ready", stage=self.stage, size=size, draws=self.pool_draws)
        return pool

    def before_step(self, step: int):
        if self.pool_refresh and step > 1 and (step - 1) % self.pool_refresh == 0:
            self.pool = self._build_pool()

    def initial_adjacency(self, count: int) -> np.ndarray:
        return self.pool[self.rng.integers(0, len(self.pool), size=count)]


class NoiseFMTrainer(_AdjacencyFlowTrainer):
    """Ablation: the same adjacency flow started from i.i.d. Gaussian matrices."""
    stage = "noise-fm"

    def initial_adjacency(self, count: int) -> np.ndarray:
        return self.rng.standard_normal((count, self.n * self.n))


def train_eigenvalues(dataset: List[SpectralData], cfg: TrainConfig,
                      tracker: Optional[TrainingTracker] = None) -> VectorFieldNet:
    return EigenvalueTrainer(dataset, cfg, tracker).fit()


def train_eigenvectors(dataset: List[SpectralData], cfg: TrainConfig,
                       tracker: Optional[TrainingTracker] = None) -> VectorFieldNet:
    return EigenvectorTrainer(dataset, cfg, tracker).fit()


def train_postprocess(dataset: List[Graph], eigval_net: VectorFieldNet, eigvec_net: VectorFieldNet,
                      cfg: TrainConfig, n_max: Optional[int] = None, pool_size: int = DEFAULT_POOL_SIZE,
                      tracker: Optional[TrainingTracker] = None,
                      pool_refresh: int = DEFAULT_POOL_REFRESH) -> VectorFieldNet:
    return PostprocessTrainer(dataset, eigval_net, eigvec_net, cfg, n_max, pool_size, tracker, pool_refresh).fit()


def noise_fm_baseline(dataset: List[Graph], cfg: TrainConfig, n_max: Optional[int] = None,
                      tracker: Optional[TrainingTracker] = None) -> VectorFieldNet:
    return NoiseFMTrainer(dataset, cfg, n_max, tracker).fit()
