from .checkpoint import load_module, load_params, save_module, save_params
from .dense import DenseNet, Module
from .losses import nll_loss, softmax
from .optim import Adam, AdamState, adam_step, polyak_update
from .recurrent import RecurrentClassifier, recurrent_forward

__all__ = [
    "Adam", "AdamState", "DenseNet", "Module", "RecurrentClassifier", "adam_step",
    "load_module", "load_params", "nll_loss", "polyak_update", "recurrent_forward",
    "save_module", "save_params", "softmax",
]
