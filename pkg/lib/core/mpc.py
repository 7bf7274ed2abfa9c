# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Finite-control-set MPC with a one-step horizon (the expert)."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.frames import CANONICAL_STATES
from core.frames import SwitchingState
from core.frames import vector_table
from core.plant import discretize
from core.plant import estimate_output_current


logger = logging.getLogger(__name__)


@dataclass
class MpcState:
    i_f_prev: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v_c_prev: np.ndarray = field(default_factory=lambda: np.zeros(2))
    first_step: bool = True


@dataclass
class ControlDecision:
    optimal_index: int
    switching: SwitchingState
    cost: float = float("nan")
    predicted_v_c: Optional[np.ndarray] = None
    estimated_i_o: Optional[np.ndarray] = None
    probabilities: Optional[np.ndarray] = None


def cost(v_ref, v_pred):
    d = np.asarray(v_ref, dtype=np.float64) - np.asarray(v_pred, dtype=np.float64)
    return float(d[0] ** 2 + d[1] ** 2)


def _candidate_predictions(model, i_f, v_c, i_o, vectors):
    """Predicted v_c(k+1) for every candidate vector, shape (7, 2)."""
    free = model.aq[1, 0] * i_f + model.aq[1, 1] * v_c + model.bdq[1] * i_o
    return free[None, :] + model.bq[1] * vectors


def control_step(mpc, i_f, v_c, v_ref, model, p, vectors=None):
    """Algorithm: estimate i_o, predict v_c(k+1) for the 7 vectors, keep the
    first strict minimum of the cost. Updates `mpc` in place."""
    i_f = np.asarray(i_f, dtype=np.float64)
    v_c = np.asarray(v_c, dtype=np.float64)
    v_ref = np.asarray(v_ref, dtype=np.float64)
    if vectors is None:
        vectors = vector_table(p.vdc)

    i_o = estimate_output_current(mpc.i_f_prev, v_c, mpc.v_c_prev, p)
    predictions = _candidate_predictions(model, i_f, v_c, i_o, vectors)
    err = v_ref[None, :] - predictions
    costs = err[:, 0] ** 2 + err[:, 1] ** 2

    # np.argmin returns the first minimiser, i.e. strict '<' in enumeration order
    best = int(np.argmin(costs))

    mpc.i_f_prev = i_f.copy()
    mpc.v_c_prev = v_c.copy()
    mpc.first_step = False

    return ControlDecision(
        optimal_index=best,
        switching=CANONICAL_STATES[best],
        cost=float(costs[best]),
        predicted_v_c=predictions[best].copy(),
        estimated_i_o=i_o,
    )


class MpcController(object):
    """Stateful wrapper used by the closed-loop harness.

    The measured output current passed to `step` is ignored; the controller
    only sees i_f, v_c and the reference, as in the expert's block diagram.
    """
    name = "mpc"

    def __init__(self, params):
        self.params = params
        self.model = discretize(params)
        self.vectors = vector_table(params.vdc)
        self.state = MpcState()

    def reset(self):
        self.state = MpcState()

    def step(self, i_f, v_c, i_o, v_ref):
        return control_step(
            self.state, i_f, v_c, v_ref, self.model, self.params, self.vectors)
