# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
import torch

from core.errors import InvalidParameterError
from core.frames import CANONICAL_STATES
from core.mpc import ControlDecision
from core.plant import estimate_output_current
from models.mlp import BASE_FEATURES


def get_features(i_f, v_c, i_o, v_ref):
    return np.concatenate([
        np.asarray(i_f, dtype=np.float64),
        np.asarray(v_c, dtype=np.float64),
        np.asarray(i_o, dtype=np.float64),
        np.asarray(v_ref, dtype=np.float64),
    ])


def get_final_preds(model, features):
    '''
    Class probabilities and argmax class for a (N, M) feature batch.
    np.argmax keeps the lowest index among equal probabilities.
    '''
    x = torch.as_tensor(np.atleast_2d(features), dtype=torch.float64)
    with torch.no_grad():
        probs = model(x).numpy()
    return probs, np.argmax(probs, axis=1)


def ann_control_step(model, i_f, v_c, i_o, v_ref, previous=None):
    features = get_features(i_f, v_c, i_o, v_ref)
    if previous is not None:
        features = np.concatenate([features, previous])
    probs, preds = get_final_preds(model, features)
    best = int(preds[0])
    return ControlDecision(
        optimal_index=best,
        switching=CANONICAL_STATES[best],
        probabilities=probs[0],
    )


class AnnController(object):
    """Trained network in the loop.

    With `io_source="estimated"` the output current fed to the network is the
    capacitor-balance estimate instead of the measured one. A 16-input model
    also receives the previous step's 8 features (zeros at the first step).
    """
    name = "ann"

    def __init__(self, model, params=None, io_source="measured"):
        if io_source not in ("measured", "estimated"):
            raise InvalidParameterError(f"Unknown io_source: {io_source}")
        if io_source == "estimated" and params is None:
            raise InvalidParameterError("io_source='estimated' needs filter params")
        n_base = len(BASE_FEATURES)
        if model.num_inputs not in (n_base, 2 * n_base):
            raise InvalidParameterError(
                f"model takes {model.num_inputs} inputs, expected {n_base} or {2 * n_base}")
        self.model = model.eval()
        self.params = params
        self.io_source = io_source
        self.delayed = model.num_inputs == 2 * n_base
        self.reset()

    def reset(self):
        self._previous = np.zeros(len(BASE_FEATURES))
        self._i_f_prev = np.zeros(2)
        self._v_c_prev = np.zeros(2)

    def step(self, i_f, v_c, i_o, v_ref):
        if self.io_source == "estimated":
            i_o = estimate_output_current(self._i_f_prev, v_c, self._v_c_prev, self.params)
            self._i_f_prev = np.array(i_f, dtype=np.float64)
            self._v_c_prev = np.array(v_c, dtype=np.float64)

        decision = ann_control_step(
            self.model, i_f, v_c, i_o, v_ref,
            previous=self._previous if self.delayed else None)
        if self.delayed:
            self._previous = get_features(i_f, v_c, i_o, v_ref)
        return decision
