"""From-scratch dense and convolutional binary classifiers."""

from loopsight.neural.layers import BatchNorm, Conv1D, Dense, Dropout, Flatten, ReLU, ShapeError, Sigmoid
from loopsight.neural.model import CNN, DNN, ModelSpec, Network, load_network, save_network
from loopsight.neural.train import (
    AdamState,
    TrainConfig,
    TrainedModel,
    TrainingDivergence,
    TrainingHistory,
    adam_update,
    bce_loss,
    evaluate,
    gradient_check,
    predict,
    train_model,
)

__all__ = [
    "CNN",
    "DNN",
    "AdamState",
    "BatchNorm",
    "Conv1D",
    "Dense",
    "Dropout",
    "Flatten",
    "ModelSpec",
    "Network",
    "ReLU",
    "ShapeError",
    "Sigmoid",
    "TrainConfig",
    "TrainedModel",
    "TrainingDivergence",
    "TrainingHistory",
    "adam_update",
    "bce_loss",
    "evaluate",
    "gradient_check",
    "load_network",
    "predict",
    "save_network",
    "train_model",
]
