# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import copy
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import torch

from core.errors import DatasetError
from core.errors import InvalidParameterError
from core.errors import TrainingDivergenceError
from core.evaluate import accuracy
from core.loss import OneHotCrossEntropyLoss
from core.scg import SCG
from models.mlp import ShallowMLP


logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    max_epochs: int = 2000
    patience: int = 50
    train_fraction: float = 0.7
    validation_fraction: float = 0.15
    rng_seed: int = 0
    sigma: float = 1e-4
    lambd: float = 1e-6
    num_hidden: int = 15
    num_classes: int = 7
    activation: str = "tanh"
    print_freq: int = 20

    def __post_init__(self):
        if self.max_epochs < 1:
            raise InvalidParameterError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise InvalidParameterError(f"patience must be >= 1, got {self.patience}")
        if not (0 < self.train_fraction < 1 and 0 <= self.validation_fraction < 1
                and self.train_fraction + self.validation_fraction <= 1):
            raise InvalidParameterError(
                f"bad split fractions {self.train_fraction}/{self.validation_fraction}")

    @classmethod
    def from_config(cls, cfg):
        return cls(
            max_epochs=cfg.TRAIN.MAX_EPOCHS,
            patience=cfg.TRAIN.PATIENCE,
            train_fraction=cfg.TRAIN.TRAIN_FRACTION,
            validation_fraction=cfg.TRAIN.VALIDATION_FRACTION,
            rng_seed=cfg.SEED,
            sigma=cfg.TRAIN.SIGMA,
            lambd=cfg.TRAIN.LAMBDA,
            num_hidden=cfg.MODEL.NUM_HIDDEN,
            num_classes=cfg.MODEL.NUM_CLASSES,
            activation=cfg.MODEL.ACTIVATION,
            print_freq=cfg.PRINT_FREQ,
        )


@dataclass
class TrainReport:
    epochs: int
    best_epoch: int
    best_val_loss: float
    stop_reason: str
    n_train: int
    n_val: int
    n_test: int
    train_loss: float
    train_acc: float
    val_acc: float
    test_loss: float
    test_acc: float
    history: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def split_indices(n, cfg):
    perm = np.random.RandomState(cfg.rng_seed).permutation(n)
    n_train = int(round(cfg.train_fraction * n))
    n_val = int(round(cfg.validation_fraction * n))
    return perm[:n_train], perm[n_train:n_train + n_val], perm[n_train + n_val:]


def _evaluate_split(model, criterion, x, y):
    if x.shape[0] == 0:
        return math.nan, math.nan
    with torch.no_grad():
        logits = model.logits(x)
        loss = criterion(logits, y).item()
    return loss, accuracy(logits.numpy(), y.numpy())


def train_scg(features, targets, cfg, model=None, writer=None):
    """Full-batch SCG with early stopping on the validation split.

    Returns the model holding the best-validation parameters and a report.
    """
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    if features.shape[0] == 0:
        raise DatasetError("training needs a nonempty dataset")
    if features.shape[0] != targets.shape[0]:
        raise DatasetError(
            f"{features.shape[0]} feature rows for {targets.shape[0]} targets")
    if not np.isfinite(features).all():
        rows = np.flatnonzero(~np.isfinite(features).all(axis=1))
        raise DatasetError(
            f"{rows.size} feature rows hold NaN or inf (first at row {rows[0]})")

    train_idx, val_idx, test_idx = split_indices(features.shape[0], cfg)
    if train_idx.size == 0:
        raise DatasetError("training split is empty")
    if val_idx.size == 0:
        logger.warning("=> validation split is empty, early stopping on training loss")
        val_idx = train_idx

    if model is None:
        model = ShallowMLP(
            num_inputs=features.shape[1],
            num_hidden=cfg.num_hidden,
            num_classes=cfg.num_classes,
            activation=cfg.activation,
        )
        model.init_weights(cfg.rng_seed)
    model.set_normalization(
        features[train_idx].mean(axis=0), features[train_idx].std(axis=0))

    x_train = torch.from_numpy(features[train_idx])
    y_train = torch.from_numpy(targets[train_idx])
    x_val = torch.from_numpy(features[val_idx])
    y_val = torch.from_numpy(targets[val_idx])
    x_test = torch.from_numpy(features[test_idx])
    y_test = torch.from_numpy(targets[test_idx])

    criterion = OneHotCrossEntropyLoss(cfg.num_classes)
    optimizer = SCG(model.parameters(), sigma=cfg.sigma, lambd=cfg.lambd)

    def closure():
        optimizer.zero_grad()
        loss = criterion(model.logits(x_train), y_train)
        loss.backward()
        return loss

    model.train()
    train_loss, _ = _evaluate_split(model, criterion, x_train, y_train)
    val_loss, _ = _evaluate_split(model, criterion, x_val, y_val)
    history = [dict(epoch=0, train_loss=train_loss, val_loss=val_loss)]
    best_val, best_epoch = val_loss, 0
    best_state = copy.deepcopy(model.state_dict())
    logger.info(
        f"=> training {'-'.join(map(str, model.shape))} on {len(train_idx)} rows "
        f"(val {len(val_idx)}, test {len(test_idx)}), initial loss {train_loss:.5f}")

    stop_reason = "max_epochs"
    wait = 0
    end = time.time()
    epoch = 0
    for epoch in range(1, cfg.max_epochs + 1):
        train_loss = optimizer.step(closure)
        if not math.isfinite(train_loss):
            raise TrainingDivergenceError(
                epoch, train_loss,
                dict(lambd=optimizer.lambd, grad_norm=optimizer.grad_norm))

        val_loss, val_acc = _evaluate_split(model, criterion, x_val, y_val)
        history.append(dict(epoch=epoch, train_loss=train_loss, val_loss=val_loss))
        if writer is not None:
            writer.add_scalar("train_loss", train_loss, epoch)
            writer.add_scalar("valid_loss", val_loss, epoch)
            writer.add_scalar("valid_acc", val_acc, epoch)

        if val_loss < best_val:
            best_val, best_epoch, wait = val_loss, epoch, 0
            best_state = copy.deepcopy(model.state_dict())
        else:
            wait += 1

        if epoch % cfg.print_freq == 0:
            msg = f"Epoch: [{epoch}/{cfg.max_epochs}]\t"
            msg += f"Time {time.time() - end:.2f}s\t"
            msg += f"Loss {train_loss:.5f}\tVal {val_loss:.5f} ({val_acc:.3f})\t"
            msg += f"lambda {optimizer.lambd:.3g}\t|g| {optimizer.grad_norm:.3g}"
            logger.info(msg)
            end = time.time()

        if wait >= cfg.patience:
            stop_reason = "patience"
            break
        if optimizer.grad_norm == 0.0:
            stop_reason = "zero_gradient"
            break

    model.load_state_dict(best_state)
    model.eval()

    restored_val, val_acc = _evaluate_split(model, criterion, x_val, y_val)
    assert restored_val == min(h["val_loss"] for h in history), \
        "restored parameters do not reach the best validation loss"
    train_loss, train_acc = _evaluate_split(model, criterion, x_train, y_train)
    test_loss, test_acc = _evaluate_split(model, criterion, x_test, y_test)

    report = TrainReport(
        epochs=epoch,
        best_epoch=best_epoch,
        best_val_loss=restored_val,
        stop_reason=stop_reason,
        n_train=int(train_idx.size),
        n_val=int(val_idx.size),
        n_test=int(test_idx.size),
        train_loss=train_loss,
        train_acc=train_acc,
        val_acc=val_acc,
        test_loss=test_loss,
        test_acc=test_acc,
        history=history,
    )
    _print_name_value(
        {"Train acc": train_acc, "Val acc": val_acc, "Test acc": test_acc,
         "Best epoch": best_epoch}, "-".join(map(str, model.shape)))
    return model, report


def _print_name_value(name_value, full_arch_name):
    names = name_value.keys()
    values = name_value.values()
    num_values = len(name_value)
    logger.info(
        '| Arch ' +
        ' '.join(['| {}'.format(name) for name in names]) +
        ' |'
    )
    logger.info('|---' * (num_values + 1) + '|')
    logger.info(
        '| ' + full_arch_name + ' ' +
        ' '.join(['| {:.3f}'.format(value) for value in values]) +
        ' |'
    )
