from .checkpoint import load_checkpoint, save_checkpoint
from .mlp import MLP, Layer, MLPParams, mlp_forward, mlp_init
from .optimizer import OptimizerState, sgd_step

__all__ = [
    # checkpoint.py
    "load_checkpoint",
    "save_checkpoint",

    # mlp.py
    "MLP",
    "Layer",
    "MLPParams",
    "mlp_forward",
    "mlp_init",

    # optimizer.py
    "OptimizerState",
    "sgd_step",
]
