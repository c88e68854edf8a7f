"""Multilayer perceptron training and evaluation for the Cleveland heart data."""

import json

from ._core import (
    Activation,
    ConfusionCounts,
    Dataset,
    InitScheme,
    OneClassOnly,
    OptimizerKind,
    StopReason,
    Topology,
    TrainConfig,
    TrainResult,
    TrainTrace,
    auc,
    confusion,
    forward,
    gradient,
    init_params,
    jacobian,
    kfold_split,
    load_heart,
    metrics,
    mse_loss,
    predict,
    run_cv_json,
    train,
)

BENCHMARK_KINDS = [OptimizerKind.LM, OptimizerKind.BFG, OptimizerKind.RP, OptimizerKind.SCG, OptimizerKind.CGB,
                   OptimizerKind.CGF, OptimizerKind.CGP, OptimizerKind.OSS, OptimizerKind.GDX]


def run_cv(dataset, kinds=None, folds=10, topology=None, config=None, jobs=1):
    """Cross-validated benchmark; returns the parsed report document."""
    text = run_cv_json(dataset, folds, list(kinds or BENCHMARK_KINDS), topology or Topology(),
                       config or TrainConfig(), jobs)
    return json.loads(text)


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
