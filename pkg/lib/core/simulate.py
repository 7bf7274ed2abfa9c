# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Closed-loop harness: controller + truth model, one scenario at a time."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.errors import SimulationDivergenceError
from core.frames import inverse_clarke
from core.plant import TruthModel


logger = logging.getLogger(__name__)


@dataclass
class WaveformRecord:
    """Per-step samples taken at the start of each sampling period.

    `v_ref` is the reference handed to the controller at that step and
    `index` the vector it chose.
    """
    scenario_id: str
    controller: str
    ts: float
    freq: float
    vref_amplitude: float
    i_f: np.ndarray
    v_c: np.ndarray
    i_o: np.ndarray
    v_ref: np.ndarray
    index: np.ndarray

    @property
    def n_steps(self):
        return len(self.index)

    @property
    def time(self):
        return np.arange(self.n_steps) * self.ts

    def phase(self, name="v_c"):
        return inverse_clarke(getattr(self, name))

    def tracking_error(self):
        return np.linalg.norm(self.v_c - self.v_ref, axis=1)

    def to_frame(self):
        v_abc = self.phase("v_c")
        return pd.DataFrame({
            "step": np.arange(self.n_steps),
            "t": self.time,
            "if_a": self.i_f[:, 0], "if_b": self.i_f[:, 1],
            "vc_a": self.v_c[:, 0], "vc_b": self.v_c[:, 1],
            "io_a": self.i_o[:, 0], "io_b": self.i_o[:, 1],
            "vref_a": self.v_ref[:, 0], "vref_b": self.v_ref[:, 1],
            "index": self.index,
            "vc_phase_a": v_abc[:, 0],
            "vc_phase_b": v_abc[:, 1],
            "vc_phase_c": v_abc[:, 2],
        })


def reference_vector(amplitude, freq, t):
    wt = 2.0 * np.pi * freq * t
    return amplitude * np.array([np.cos(wt), np.sin(wt)])


def run_closed_loop(scenario, controller, substeps=32, reference_advance=False,
                    blowup_factor=2.0, r_on=0.1, n_steps=None):
    p = scenario.filter_params
    truth = TruthModel(p, scenario.build_load(r_on), substeps)
    state = truth.initial_state()
    controller.reset()

    n = scenario.n_steps if n_steps is None else int(n_steps)
    i_f = np.zeros((n, 2))
    v_c = np.zeros((n, 2))
    i_o = np.zeros((n, 2))
    v_ref = np.zeros((n, 2))
    index = np.zeros(n, dtype=np.int64)
    limit = blowup_factor * p.vdc

    for k in range(n):
        t = (k + 1) * p.ts if reference_advance else k * p.ts
        ref = reference_vector(scenario.vref_v, scenario.freq_hz, t)
        meas = truth.output_current(state)
        decision = controller.step(state.i_f, state.v_c, meas, ref)

        i_f[k], v_c[k], i_o[k], v_ref[k] = state.i_f, state.v_c, meas, ref
        index[k] = decision.optimal_index

        state = truth.step(state, decision.switching)
        if not state.is_finite():
            raise SimulationDivergenceError(
                "non-finite plant state", scenario.id, step=k + 1)
        if np.hypot(*state.v_c) >= limit:
            raise SimulationDivergenceError(
                f"|v_c| = {np.hypot(*state.v_c):.1f} V exceeds "
                f"{blowup_factor:g} x Vdc", scenario.id, step=k + 1)

    logger.debug(f"[{scenario.id}] {controller.name}: {n} steps")
    return WaveformRecord(
        scenario_id=scenario.id,
        controller=controller.name,
        ts=p.ts,
        freq=scenario.freq_hz,
        vref_amplitude=scenario.vref_v,
        i_f=i_f, v_c=v_c, i_o=i_o, v_ref=v_ref, index=index,
    )


def sim_options(cfg):
    return dict(
        substeps=cfg.SIM.SUBSTEPS,
        reference_advance=cfg.SIM.REFERENCE_ADVANCE,
        blowup_factor=cfg.SIM.BLOWUP_FACTOR,
        r_on=cfg.SIM.RECTIFIER_R_ON,
    )
