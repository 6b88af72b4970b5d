from .ops import add, cross_entropy, linear, mean, reduce_sum, relu, scale, weighted_sum
from .tensor import Array, Tape, TapeNode, Tensor, active_tape, backward

__all__ = [
    # ops.py
    "add",
    "cross_entropy",
    "linear",
    "mean",
    "reduce_sum",
    "relu",
    "scale",
    "weighted_sum",

    # tensor.py
    "Array",
    "Tape",
    "TapeNode",
    "Tensor",
    "active_tape",
    "backward",
]
