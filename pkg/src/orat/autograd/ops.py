import numpy as np
from numpy.typing import ArrayLike, NDArray

from orat.core.exceptions import DimensionError, LabelIndexError, NumericError

from .tensor import Array, Tensor, VectorJacobian, active_tape


def _emit(
        data: Array,
        inputs: tuple[Tensor, ...],
        vjp: VectorJacobian,
        op_name: str,
) -> Tensor:
    # Record only when a tape is listening and some input is tracked
    out = Tensor(data)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(out, inputs, vjp, op_name)

    return out


def _require_finite(op_name: str, *tensors: Tensor) -> None:
    for tensor in tensors:
        if not np.isfinite(tensor.data).all():
            raise NumericError(f"{op_name}: non-finite input of shape {tensor.shape}")


# ==================== LAYERS ====================
def linear(input: Tensor, weight: Tensor, bias: Tensor) -> Tensor:  # noqa: A002
    """Affine map ``input @ weight + bias`` for ``input`` of shape (n, d)."""
    if (
        input.data.ndim != 2  # noqa: PLR2004
        or weight.data.ndim != 2  # noqa: PLR2004
        or bias.data.ndim != 1
        or input.shape[1] != weight.shape[0]
        or weight.shape[1] != bias.shape[0]
    ):
        raise DimensionError(
            f"linear: input {input.shape} x weight {weight.shape} + bias {bias.shape}"
            " do not conform",
        )

    _require_finite("linear", input, weight, bias)

    x, w = input.data, weight.data

    def vjp(g: Array) -> tuple[Array, Array, Array]:
        return g @ w.T, x.T @ g, g.sum(axis=0)

    return _emit(x @ w + bias.data, (input, weight, bias), vjp, "linear")


def relu(input: Tensor) -> Tensor:  # noqa: A002
    """Elementwise ``max(0, x)``; the subgradient at 0 is 0."""
    _require_finite("relu", input)

    active = input.data > 0

    def vjp(g: Array) -> tuple[Array]:
        return (g * active,)

    return _emit(np.where(active, input.data, 0.0), (input,), vjp, "relu")


# ==================== LOSSES ====================
def cross_entropy(logits: Tensor, labels: ArrayLike) -> Tensor:
    """Per-sample ``-log softmax(logits_i)[label_i]`` as a length-n tensor.

    The log-sum-exp is shifted by the row maximum, so extreme logits produced by
    attacks stay finite and every loss is non-negative.

    Raises:
        DimensionError: logits are not (n, C) or labels are not length n.
        LabelIndexError: a label lies outside ``[0, C)``.

    """
    label_idx = np.asarray(labels)
    if logits.data.ndim != 2 or label_idx.shape != (logits.shape[0],):  # noqa: PLR2004
        raise DimensionError(
            f"cross_entropy: logits {logits.shape} vs labels {label_idx.shape}",
        )

    num_classes = logits.shape[1]
    if label_idx.size and (label_idx.min() < 0 or label_idx.max() >= num_classes):
        raise LabelIndexError(
            f"cross_entropy: labels must lie in [0, {num_classes}), "
            f"got range [{label_idx.min()}, {label_idx.max()}]",
        )

    _require_finite("cross_entropy", logits)

    rows = np.arange(logits.shape[0])
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    exp_shifted = np.exp(shifted)
    partition = exp_shifted.sum(axis=1)
    losses = np.log(partition) - shifted[rows, label_idx]

    def vjp(g: Array) -> tuple[Array]:
        grad = exp_shifted / partition[:, None]
        grad[rows, label_idx] -= 1.0
        return (grad * g[:, None],)

    return _emit(losses, (logits,), vjp, "cross_entropy")


# ==================== ARITHMETIC ====================
def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise DimensionError(f"add: shapes {a.shape} and {b.shape} differ")

    def vjp(g: Array) -> tuple[Array, Array]:
        return g, g

    return _emit(a.data + b.data, (a, b), vjp, "add")


def scale(a: Tensor, factor: float) -> Tensor:
    factor = float(factor)

    def vjp(g: Array) -> tuple[Array]:
        return (factor * g,)

    return _emit(factor * a.data, (a,), vjp, "scale")


def reduce_sum(a: Tensor) -> Tensor:
    def vjp(g: Array) -> tuple[Array]:
        return (np.full_like(a.data, float(g)),)

    return _emit(np.array(a.data.sum()), (a,), vjp, "sum")


def weighted_sum(a: Tensor, weights: NDArray[np.float64]) -> Tensor:
    """Scalar ``Σ_i w_i·a_i`` with constant weights."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != a.shape:
        raise DimensionError(f"weighted_sum: weights {w.shape} vs tensor {a.shape}")

    def vjp(g: Array) -> tuple[Array]:
        return (float(g) * w,)

    return _emit(np.array(np.dot(w.ravel(), a.data.ravel())), (a,), vjp, "weighted_sum")


def mean(a: Tensor) -> Tensor:
    return scale(reduce_sum(a), 1.0 / a.size)
