import pickle

import numpy as np
import pytest
import torch

from conftest import make_scenario
from core.errors import InvalidParameterError
from core.errors import SimulationDivergenceError
from core.frames import CANONICAL_STATES
from core.frames import vector_table
from core.inference import AnnController
from core.inference import ann_control_step
from core.inference import get_features
from core.mpc import ControlDecision
from core.mpc import MpcController
from core.plant import estimate_output_current
from core.simulate import reference_vector
from core.simulate import run_closed_loop
from models.mlp import ShallowMLP


class PumpController(object):
    """Applies the vector best aligned with the filter current; on a lossless
    LC this keeps adding energy."""
    name = "pump"

    def __init__(self, vdc):
        self.vectors = vector_table(vdc)

    def reset(self):
        pass

    def step(self, i_f, v_c, i_o, v_ref):
        if np.hypot(*i_f) < 1e-9:
            best = 1
        else:
            best = int(np.argmax(self.vectors @ i_f))
        return ControlDecision(best, CANONICAL_STATES[best])


def _zero_ann(num_inputs=8):
    model = ShallowMLP(num_inputs=num_inputs)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model


def _random_ann(num_inputs=8, seed=0):
    model = ShallowMLP(num_inputs=num_inputs)
    model.init_weights(seed)
    model.set_normalization(np.zeros(num_inputs), np.full(num_inputs, 100.0))
    return model


def test_reference_vector():
    np.testing.assert_allclose(reference_vector(200.0, 50.0, 0.0), [200.0, 0.0])
    np.testing.assert_allclose(reference_vector(200.0, 50.0, 0.005), [0.0, 200.0], atol=1e-12)


def test_closed_loop_record_layout():
    scenario = make_scenario(cycles=1.0)
    record = run_closed_loop(scenario, MpcController(scenario.filter_params), substeps=8)

    assert record.n_steps == scenario.n_steps == 667
    assert record.controller == "mpc" and record.scenario_id == "T"
    np.testing.assert_array_equal(record.v_c[0], 0.0)
    np.testing.assert_allclose(record.v_ref[0], [200.0, 0.0])
    assert record.index.min() >= 0 and record.index.max() <= 6
    # 5 kOhm draws v_c / R
    np.testing.assert_allclose(record.i_o, record.v_c / 5000.0)

    frame = record.to_frame()
    assert list(frame.columns) == [
        "step", "t", "if_a", "if_b", "vc_a", "vc_b", "io_a", "io_b",
        "vref_a", "vref_b", "index", "vc_phase_a", "vc_phase_b", "vc_phase_c"]
    np.testing.assert_allclose(frame["vc_phase_a"], record.v_c[:, 0])
    np.testing.assert_allclose(
        frame[["vc_phase_a", "vc_phase_b", "vc_phase_c"]].sum(axis=1), 0.0, atol=1e-9)


def test_reference_advance_shifts_reference():
    scenario = make_scenario(cycles=0.1)
    p = scenario.filter_params
    record = run_closed_loop(scenario, MpcController(p), substeps=4, reference_advance=True)
    np.testing.assert_allclose(record.v_ref[0], reference_vector(200.0, 50.0, p.ts))


def test_closed_loop_is_deterministic():
    scenario = make_scenario("I", {"kind": "inductive", "l_h": 0.01}, cycles=0.5)
    runs = [run_closed_loop(scenario, MpcController(scenario.filter_params), substeps=8)
            for _ in range(2)]
    np.testing.assert_array_equal(runs[0].index, runs[1].index)
    np.testing.assert_array_equal(runs[0].v_c, runs[1].v_c)


def test_blow_up_is_detected():
    scenario = make_scenario("pump", {"kind": "open_circuit"}, cycles=5.0)
    with pytest.raises(SimulationDivergenceError) as info:
        run_closed_loop(scenario, PumpController(500.0), substeps=8)
    err = info.value
    assert err.scenario_id == "pump"
    assert err.last_good_step == err.step - 1
    assert "exceeds" in str(err)

    # travels intact through a process pool
    back = pickle.loads(pickle.dumps(err))
    assert (back.scenario_id, back.step, str(back)) == (err.scenario_id, err.step, str(err))


def test_degenerate_network_always_picks_zero_vector():
    scenario = make_scenario(cycles=0.5)
    record = run_closed_loop(scenario, AnnController(_zero_ann()), substeps=4)
    np.testing.assert_array_equal(record.index, 0)
    np.testing.assert_array_equal(record.v_c, 0.0)


def test_ann_decision_carries_probabilities():
    model = _random_ann()
    decision = ann_control_step(model, [1.0, 2.0], [100.0, -50.0], [0.5, 0.1], [200.0, 0.0])
    assert decision.probabilities.shape == (7,)
    assert decision.optimal_index == int(np.argmax(decision.probabilities))
    assert decision.switching == CANONICAL_STATES[decision.optimal_index]
    assert np.isnan(decision.cost)


def test_delayed_controller_feeds_previous_features(rng):
    model = _random_ann(16, seed=3)
    ctrl = AnnController(model)
    assert ctrl.delayed
    x1, x2 = rng.normal(scale=50.0, size=(2, 4, 2))

    first = ctrl.step(*x1)
    np.testing.assert_allclose(
        first.probabilities,
        ann_control_step(model, *x1, previous=np.zeros(8)).probabilities)
    second = ctrl.step(*x2)
    np.testing.assert_allclose(
        second.probabilities,
        ann_control_step(model, *x2, previous=get_features(*x1)).probabilities)

    ctrl.reset()
    again = ctrl.step(*x1)
    np.testing.assert_allclose(again.probabilities, first.probabilities)


def test_estimated_output_current_replaces_measurement(nominal, rng):
    model = _random_ann(seed=8)
    ctrl = AnnController(model, nominal, io_source="estimated")
    (i_f1, v_c1, v_ref1), (i_f2, v_c2, v_ref2) = rng.normal(scale=50.0, size=(2, 3, 2))

    first = ctrl.step(i_f1, v_c1, np.array([1e6, 1e6]), v_ref1)
    io1 = estimate_output_current(np.zeros(2), v_c1, np.zeros(2), nominal)
    np.testing.assert_allclose(
        first.probabilities, ann_control_step(model, i_f1, v_c1, io1, v_ref1).probabilities)

    second = ctrl.step(i_f2, v_c2, None, v_ref2)
    io2 = estimate_output_current(i_f1, v_c2, v_c1, nominal)
    np.testing.assert_allclose(
        second.probabilities, ann_control_step(model, i_f2, v_c2, io2, v_ref2).probabilities)


def test_ann_controller_rejects_bad_setup(nominal):
    with pytest.raises(InvalidParameterError):
        AnnController(_zero_ann(), nominal, io_source="observer")
    with pytest.raises(InvalidParameterError):
        AnnController(_zero_ann(), None, io_source="estimated")
    odd = ShallowMLP(num_inputs=9, feature_names=[f"x{i}" for i in range(9)])
    with pytest.raises(InvalidParameterError):
        AnnController(odd)
