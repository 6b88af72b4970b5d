import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from orat.autograd import Array, Tensor, linear, relu
from orat.core import ConfigError, DimensionError, NumericError
from orat.utils import Rng

logger = logging.getLogger(__name__)


# ==================== PARAMETERS ====================
@dataclass(frozen=True)
class Layer:
    weight: Tensor  # (in, out)
    bias: Tensor  # (out,)


@dataclass(frozen=True)
class MLPParams:
    """Parameters θ of a ReLU feed-forward classifier; the last layer emits logits."""

    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ConfigError("an MLP needs at least one layer")

        for index, layer in enumerate(self.layers):
            w_shape, b_shape = layer.weight.shape, layer.bias.shape
            if len(w_shape) != 2 or b_shape != (w_shape[1],):  # noqa: PLR2004
                raise DimensionError(
                    f"layer {index}: weight {w_shape} and bias {b_shape}",
                )

            if index > 0 and self.layers[index - 1].weight.shape[1] != w_shape[0]:
                raise DimensionError(
                    f"layer {index} expects {w_shape[0]} inputs but layer {index - 1} "
                    f"emits {self.layers[index - 1].weight.shape[1]}",
                )

            if not all(np.isfinite(t.data).all() for t in (layer.weight, layer.bias)):
                raise NumericError(f"layer {index} holds non-finite parameters")

    # -- Properties --
    @property
    def layer_sizes(self) -> tuple[int, ...]:
        widths = (layer.weight.shape[1] for layer in self.layers)
        return (self.layers[0].weight.shape[0], *widths)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def num_classes(self) -> int:
        return self.layer_sizes[-1]

    # -- Public methods --
    def tensors(self) -> list[Tensor]:
        """Every parameter tensor in layer order: weight, bias, weight, bias, ..."""
        return [t for layer in self.layers for t in (layer.weight, layer.bias)]

    def arrays(self) -> tuple[Array, ...]:
        """Read-only copies of every parameter array, in ``tensors()`` order."""
        snapshot = []
        for tensor in self.tensors():
            array = tensor.numpy()
            array.setflags(write=False)
            snapshot.append(array)

        return tuple(snapshot)

    def constant(self) -> "MLPParams":
        """Untracked view of the same values, for input-gradient-only passes."""
        return MLPParams(
            tuple(
                Layer(layer.weight.constant(), layer.bias.constant())
                for layer in self.layers
            ),
        )

    @classmethod
    def from_arrays(cls, arrays: Sequence[Array]) -> "MLPParams":
        if len(arrays) % 2:
            raise DimensionError("parameter arrays must come in (weight, bias) pairs")

        return cls(
            tuple(
                Layer(
                    Tensor(arrays[i], requires_grad=True),
                    Tensor(arrays[i + 1], requires_grad=True),
                )
                for i in range(0, len(arrays), 2)
            ),
        )


# ==================== CONSTRUCTION / FORWARD ====================
def mlp_init(layer_sizes: Sequence[int], rng: Rng) -> MLPParams:
    """Draw weights uniformly from ``[-s, s]`` with ``s = sqrt(6 / (in + out))``.

    Biases start at zero.

    Args:
        layer_sizes: Input width, hidden widths, and number of classes.
        rng: Seeded stream; the same seed always gives the same parameters.

    Raises:
        ConfigError: Fewer than two sizes, or a non-positive size.

    """
    sizes = [int(size) for size in layer_sizes]
    if len(sizes) < 2 or any(size <= 0 for size in sizes):  # noqa: PLR2004
        raise ConfigError(f"invalid layer sizes {list(layer_sizes)}")

    arrays: list[Array] = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:], strict=True):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        arrays.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        arrays.append(np.zeros(fan_out))

    logger.debug("Initialized MLP with layer sizes %s.", sizes)

    return MLPParams.from_arrays(arrays)


def mlp_forward(params: MLPParams, x: Tensor) -> Tensor:
    """Logits for a batch ``x`` of shape (n, d), recorded on the active tape."""
    if x.data.ndim != 2 or x.shape[1] != params.input_dim:  # noqa: PLR2004
        raise DimensionError(
            f"mlp_forward: input {x.shape} but network expects d={params.input_dim}",
        )

    hidden = x
    last = len(params.layers) - 1
    for index, layer in enumerate(params.layers):
        hidden = linear(hidden, layer.weight, layer.bias)
        if index < last:
            hidden = relu(hidden)

    return hidden


class MLP:
    """Classifier adapter so attacks and evaluation can drive an MLP by protocol."""

    def forward(self, params: MLPParams, x: Tensor) -> Tensor:
        return mlp_forward(params, x)

    def without_tracking(self, params: MLPParams) -> MLPParams:
        return params.constant()
