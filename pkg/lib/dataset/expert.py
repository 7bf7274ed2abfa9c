# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Expert demonstrations: the MPC controller run over a scenario grid.

Dataset file: CSV with header

    scenario_id,step,if_a,if_b,vc_a,vc_b,io_a,io_b,vref_a,vref_b,target

ordered by scenario (grid order) then step. Floats are written with '%.17g'
so a read back with float_precision='round_trip' is exact. `io_*` is the true
load current; `target` is the index of the vector MPC applied.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging

import numpy as np
import pandas as pd
import torch
from torch.utils.data import Dataset

from core.errors import DatasetError
from core.errors import NumericalError
from core.mpc import MpcController
from core.simulate import run_closed_loop
from models.mlp import BASE_FEATURES
from utils.utils import map_ordered


logger = logging.getLogger(__name__)

FEATURE_COLUMNS = list(BASE_FEATURES)
DATASET_COLUMNS = ["scenario_id", "step"] + FEATURE_COLUMNS + ["target"]


def record_to_frame(record):
    return pd.DataFrame({
        "scenario_id": record.scenario_id,
        "step": np.arange(record.n_steps, dtype=np.int64),
        "if_a": record.i_f[:, 0], "if_b": record.i_f[:, 1],
        "vc_a": record.v_c[:, 0], "vc_b": record.v_c[:, 1],
        "io_a": record.i_o[:, 0], "io_b": record.i_o[:, 1],
        "vref_a": record.v_ref[:, 0], "vref_b": record.v_ref[:, 1],
        "target": record.index.astype(np.int64),
    }, columns=DATASET_COLUMNS)


def empty_frame():
    frame = pd.DataFrame({c: pd.Series(dtype=np.float64) for c in DATASET_COLUMNS})
    frame["scenario_id"] = frame["scenario_id"].astype(object)
    frame["step"] = frame["step"].astype(np.int64)
    frame["target"] = frame["target"].astype(np.int64)
    return frame


def _collect_one(job):
    scenario, options = job
    try:
        controller = MpcController(scenario.filter_params)
        record = run_closed_loop(scenario, controller, **options)
    except NumericalError as e:
        return scenario.id, None, e
    return scenario.id, record_to_frame(record), None


def collect(grid, substeps=32, workers=1, keep_going=False, **options):
    """Run the MPC expert over `grid`; returns (dataset frame, failed ids).

    Divergence aborts the collection unless `keep_going`, in which case the
    failed scenario is logged and skipped.
    """
    options = dict(options, substeps=substeps)
    jobs = [(scenario, options) for scenario in grid]
    frames, failed = [], []
    for scenario_id, frame, error in map_ordered(_collect_one, jobs, workers):
        if error is not None:
            if not keep_going:
                raise error
            logger.error(f"=> {scenario_id} failed: {error}")
            failed.append(scenario_id)
            continue
        logger.info(f"=> collected {scenario_id}: {len(frame)} rows")
        frames.append(frame)

    if not frames:
        return empty_frame(), failed
    return pd.concat(frames, ignore_index=True), failed


def write_dataset(frame, path):
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def read_dataset(path, num_classes=7):
    try:
        frame = pd.read_csv(
            path, float_precision="round_trip", dtype={"scenario_id": str})
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path}: empty file")
    except pd.errors.ParserError as e:
        raise DatasetError(f"{path}: {e}")

    if list(frame.columns) != DATASET_COLUMNS:
        raise DatasetError(
            f"{path}: header {list(frame.columns)} != {DATASET_COLUMNS}")
    if frame[FEATURE_COLUMNS].isna().any().any():
        raise DatasetError(f"{path}: missing feature values")
    if not np.isfinite(frame[FEATURE_COLUMNS].to_numpy(dtype=np.float64)).all():
        raise DatasetError(f"{path}: infinite feature values")
    target = frame["target"].to_numpy()
    if target.size and (target.min() < 0 or target.max() >= num_classes):
        raise DatasetError(f"{path}: targets outside [0, {num_classes - 1}]")
    return frame


def build_features(frame, delayed=False):
    """(N, 8) feature matrix, or (N, 16) with each row's previous-step features
    appended (zeros at the first step of every scenario)."""
    x = frame[FEATURE_COLUMNS].to_numpy(dtype=np.float64)
    if not delayed:
        return x
    prev = np.zeros_like(x)
    if len(frame):
        prev[1:] = x[:-1]
        first = frame["scenario_id"].to_numpy()
        first = np.concatenate([[True], first[1:] != first[:-1]])
        prev[first] = 0.0
    return np.hstack([x, prev])


class ExpertDataset(Dataset):
    def __init__(self, frame, delayed=False):
        self.frame = frame
        self.features = build_features(frame, delayed)
        self.targets = frame["target"].to_numpy(dtype=np.int64)

    def __len__(self):
        return len(self.targets)

    def __getitem__(self, idx):
        return (torch.from_numpy(self.features[idx]),
                torch.tensor(self.targets[idx]))

    def class_histogram(self, num_classes=7):
        return np.bincount(self.targets, minlength=num_classes)
