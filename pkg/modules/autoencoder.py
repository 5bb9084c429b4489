"""
Dense autoencoder for streamdrift.

Symmetric multilayer perceptron (tanh hidden layers, identity output) trained
with mini-batch Adam on mean squared reconstruction error. Reconstruction
error per data point is the anomaly score used by the model pool.
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from sklearn.decomposition import PCA

logger = logging.getLogger(__name__)


class ModelConfigError(Exception):
    """Raised when autoencoder dimensions or hyperparameters are invalid."""
    pass


class DimensionMismatchError(Exception):
    """Raised when input data does not match the model's input dimensionality."""
    pass


class NumericDivergenceError(Exception):
    """Raised when training produces a non-finite loss or parameter."""
    pass


@dataclass
class DenseAutoencoder:
    """
    Symmetric encoder/decoder network.

    weights[i] has shape (layer_dims[i], layer_dims[i + 1]) and biases[i] has
    shape (layer_dims[i + 1],). The latent layer sits in the middle of
    layer_dims.
    """

    layer_dims: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def latent_index(self) -> int:
        return len(self.layer_dims) // 2

    @property
    def latent_dim(self) -> int:
        return self.layer_dims[self.latent_index]

    @property
    def param_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def parameters(self) -> List[np.ndarray]:
        """Parameters in a fixed order: W0, b0, W1, b1, ..."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.append(w)
            params.append(b)
        return params

    def set_parameters(self, params: List[np.ndarray]) -> None:
        """Replace parameters from a list in parameters() order."""
        if len(params) != 2 * len(self.weights):
            raise ModelConfigError(
                f"Expected {2 * len(self.weights)} parameter arrays, got {len(params)}"
            )
        for i in range(len(self.weights)):
            w, b = params[2 * i], params[2 * i + 1]
            if w.shape != self.weights[i].shape or b.shape != self.biases[i].shape:
                raise ModelConfigError(f"Parameter shape mismatch at layer {i}")
            self.weights[i] = np.array(w, dtype=np.float64)
            self.biases[i] = np.array(b, dtype=np.float64)

    def copy(self) -> "DenseAutoencoder":
        return DenseAutoencoder(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


@dataclass
class OptimizerState:
    """
    Adam optimizer state for one autoencoder.

    m and v hold first/second moment estimates in parameters() order.
    The mini-batch shuffle for each epoch is derived from (seed, step), so
    the state carries no generator object and copies cleanly.
    """

    learning_rate: float = 1e-3
    minibatch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    seed: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    def copy(self) -> "OptimizerState":
        return copy.deepcopy(self)


def layer_dims_for(input_dim: int, latent_dim: int, n_hidden_layers: int) -> List[int]:
    """
    Palindromic layer dimensions for an autoencoder.

    Encoder sizes decrease linearly from input_dim to latent_dim over
    n_hidden_layers steps (fractional sizes truncated), decoder mirrored.

    Example:
        >>> layer_dims_for(784, 20, 3)
        [784, 529, 274, 20, 274, 529, 784]
        >>> layer_dims_for(4, 2, 1)
        [4, 2, 4]
    """
    if input_dim < 2:
        raise ModelConfigError(f"input_dim must be at least 2 (got {input_dim})")
    if latent_dim < 1:
        raise ModelConfigError(f"latent_dim must be positive (got {latent_dim})")
    if latent_dim >= input_dim:
        raise ModelConfigError(
            f"latent_dim must be smaller than input_dim (got latent_dim={latent_dim}, input_dim={input_dim})"
        )
    if n_hidden_layers < 1:
        raise ModelConfigError(f"n_hidden_layers must be at least 1 (got {n_hidden_layers})")

    encoder = np.linspace(input_dim, latent_dim, n_hidden_layers + 1).astype(int).tolist()
    encoder[0], encoder[-1] = input_dim, latent_dim
    return encoder + encoder[-2::-1]


def init_model(input_dim: int, latent_dim: int, n_hidden_layers: int, seed: int) -> DenseAutoencoder:
    """
    Create an autoencoder with Glorot-uniform weights and zero biases.

    Weights are drawn from a PCG64 generator seeded with `seed`, so the same
    (dims, seed) always yields bitwise-identical parameters.

    Args:
        input_dim: Data dimensionality d
        latent_dim: Size of the latent layer (< input_dim)
        n_hidden_layers: Number of encoder layer transitions (>= 1)
        seed: Seed for the weight generator

    Returns:
        Freshly initialized DenseAutoencoder

    Raises:
        ModelConfigError: If the dimensions are invalid
    """
    dims = layer_dims_for(input_dim, latent_dim, n_hidden_layers)
    rng = np.random.default_rng(seed)

    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))

    return DenseAutoencoder(layer_dims=dims, weights=weights, biases=biases)


def init_optimizer(
    model: DenseAutoencoder,
    learning_rate: float = 1e-3,
    minibatch_size: int = 32,
    seed: int = 0,
) -> OptimizerState:
    """Fresh Adam state with zero moments shaped like the model's parameters."""
    if learning_rate <= 0:
        raise ModelConfigError(f"learning_rate must be positive (got {learning_rate})")
    if minibatch_size < 1:
        raise ModelConfigError(f"minibatch_size must be positive (got {minibatch_size})")

    params = model.parameters()
    return OptimizerState(
        learning_rate=learning_rate,
        minibatch_size=minibatch_size,
        seed=seed,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
    )


def _check_input(model: DenseAutoencoder, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D matrix, got array with shape {X.shape}")
    if X.shape[1] != model.input_dim:
        raise DimensionMismatchError(
            f"Input has {X.shape[1]} columns but the model expects {model.input_dim}"
        )
    if X.shape[0] == 0:
        raise DimensionMismatchError("Input matrix has no rows")
    if not np.all(np.isfinite(X)):
        raise DimensionMismatchError("Input matrix contains non-finite values")
    return X


def _activations(model: DenseAutoencoder, X: np.ndarray) -> List[np.ndarray]:
    """Layer outputs A[0]=X ... A[L]=X_hat (tanh on hidden layers, identity on output)."""
    outputs = [X]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        pre = outputs[-1] @ w + b
        outputs.append(pre if i == last else np.tanh(pre))
    return outputs


def forward(model: DenseAutoencoder, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run the autoencoder.

    Returns:
        (Z, X_hat): latent activations (b x latent) and reconstruction (b x d)

    Raises:
        DimensionMismatchError: If X does not have input_dim columns
    """
    X = _check_input(model, X)
    outputs = _activations(model, X)
    return outputs[model.latent_index], outputs[-1]


def latent(model: DenseAutoencoder, X: np.ndarray) -> np.ndarray:
    """Latent representation E(X)."""
    return forward(model, X)[0]


def reconstruction_scores(model: DenseAutoencoder, X: np.ndarray) -> np.ndarray:
    """
    Per-point anomaly score: squared L2 reconstruction error divided by d.

    Example:
        A zero network reconstructs everything as 0, so a row of four ones
        scores ||1 - 0||^2 / 4 = 1.0.
    """
    X = _check_input(model, X)
    X_hat = _activations(model, X)[-1]
    return np.mean((X - X_hat) ** 2, axis=1)


def loss_and_gradients(model: DenseAutoencoder, X: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """
    Mean squared reconstruction error over all entries of X and its gradient.

    Gradients are returned in parameters() order.
    """
    X = _check_input(model, X)
    outputs = _activations(model, X)
    residual = outputs[-1] - X
    loss = float(np.mean(residual ** 2))

    delta = 2.0 * residual / residual.size
    grads_w: List[Optional[np.ndarray]] = [None] * len(model.weights)
    grads_b: List[Optional[np.ndarray]] = [None] * len(model.weights)
    for layer in range(len(model.weights) - 1, -1, -1):
        grads_w[layer] = outputs[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            # tanh'(pre) = 1 - tanh(pre)^2
            delta = (delta @ model.weights[layer].T) * (1.0 - outputs[layer] ** 2)

    grads = []
    for gw, gb in zip(grads_w, grads_b):
        grads.append(gw)
        grads.append(gb)
    return loss, grads


def _adam_step(model: DenseAutoencoder, opt: OptimizerState, grads: List[np.ndarray]) -> None:
    opt.step += 1
    correction1 = 1.0 - opt.beta1 ** opt.step
    correction2 = 1.0 - opt.beta2 ** opt.step

    params = model.parameters()
    for i, (param, grad) in enumerate(zip(params, grads)):
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grad
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grad ** 2
        m_hat = opt.m[i] / correction1
        v_hat = opt.v[i] / correction2
        param -= opt.learning_rate * m_hat / (np.sqrt(v_hat) + opt.epsilon)


def train_epochs(
    model: DenseAutoencoder,
    opt: OptimizerState,
    X: np.ndarray,
    epochs: int,
) -> Tuple[DenseAutoencoder, OptimizerState]:
    """
    Train the model in place for `epochs` passes of mini-batch Adam.

    Rows are shuffled each epoch with a generator seeded from (opt.seed,
    opt.step); the last partial mini-batch is used as-is. Counting how many
    stream batches a model has seen is the caller's job.

    Args:
        model: Autoencoder to update (mutated)
        opt: Optimizer state for this model (mutated)
        X: Training matrix (b x d)
        epochs: Number of passes over X (>= 1)

    Returns:
        The same (model, opt) objects, updated

    Raises:
        ModelConfigError: If epochs < 1
        NumericDivergenceError: If a mini-batch loss or update is non-finite
    """
    if epochs < 1:
        raise ModelConfigError(f"epochs must be at least 1 (got {epochs})")
    X = _check_input(model, X)
    n_rows = X.shape[0]

    for epoch in range(epochs):
        rng = np.random.default_rng((opt.seed, opt.step))
        order = rng.permutation(n_rows)
        for minibatch_index, start in enumerate(range(0, n_rows, opt.minibatch_size)):
            rows = X[order[start:start + opt.minibatch_size]]
            loss, grads = loss_and_gradients(model, rows)
            if not np.isfinite(loss):
                raise NumericDivergenceError(
                    f"Non-finite training loss at epoch {epoch}, mini-batch {minibatch_index}"
                )
            _adam_step(model, opt, grads)
            if not all(np.all(np.isfinite(p)) for p in model.parameters()):
                raise NumericDivergenceError(
                    f"Non-finite parameters after epoch {epoch}, mini-batch {minibatch_index}"
                )

    return model, opt


def mean_reconstruction_error(model: DenseAutoencoder, X: np.ndarray) -> float:
    """Average anomaly score of X (equals the training loss on X)."""
    return float(np.mean(reconstruction_scores(model, X)))


def suggest_latent_dim(X: np.ndarray, explained_variance: float = 0.7) -> int:
    """
    Smallest number of principal components explaining `explained_variance`.

    Used to size the latent layer from the first batch when no latent size
    is configured. The result is clamped to [1, d - 1].

    Raises:
        ModelConfigError: If X has fewer than 2 rows or 2 columns, or the
            target ratio is outside (0, 1]
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise ModelConfigError(f"Need at least a 2 x 2 matrix to choose a latent size (got {X.shape})")
    if not 0.0 < explained_variance <= 1.0:
        raise ModelConfigError(f"explained_variance must be in (0, 1] (got {explained_variance})")

    pca = PCA().fit(X)
    ratios = pca.explained_variance_ratio_
    if not np.all(np.isfinite(ratios)) or ratios.sum() <= 0:
        logger.warning("First batch has no variance; using latent size 1")
        return 1

    cumulative = np.cumsum(ratios)
    n_components = int(np.searchsorted(cumulative, explained_variance - 1e-12) + 1)
    return int(min(max(n_components, 1), X.shape[1] - 1))
