import numpy as np
import pandas as pd
import pytest
import torch

import dataset.expert as expert_module
from conftest import make_scenario
from core.errors import DatasetError
from core.errors import SimulationDivergenceError
from core.mpc import MpcState
from core.mpc import control_step
from core.plant import discretize
from dataset import ExpertDataset
from dataset.expert import DATASET_COLUMNS
from dataset.expert import build_features
from dataset.expert import collect
from dataset.expert import read_dataset
from dataset.expert import write_dataset


@pytest.fixture(scope="module")
def small_grid():
    return [
        make_scenario("A", {"kind": "resistive", "r_ohm": 20.0}, cycles=1.0),
        make_scenario("B", {"kind": "open_circuit"}, vref_v=150.0, cycles=1.0),
    ]


@pytest.fixture(scope="module")
def collected(small_grid):
    frame, failed = collect(small_grid, substeps=8)
    assert failed == []
    return frame


def test_collect_layout(collected, small_grid):
    assert list(collected.columns) == DATASET_COLUMNS
    per = collected.groupby("scenario_id", sort=False).size()
    assert list(per.index) == ["A", "B"]
    assert list(per) == [s.n_steps for s in small_grid] == [667, 667]
    assert collected["step"].iloc[0] == 0
    assert collected["target"].between(0, 6).all()
    # first sample is the de-energised plant
    first = collected.loc[0, ["if_a", "if_b", "vc_a", "vc_b"]].to_numpy(dtype=np.float64)
    np.testing.assert_array_equal(first, 0.0)


def test_two_cycle_row_count():
    frame, _ = collect([make_scenario("C", cycles=2.0)], substeps=4)
    assert len(frame) == 1333


def test_labels_replay_through_controller(collected, small_grid, tmp_path):
    path = str(tmp_path / "data.csv")
    write_dataset(collected, path)
    frame = read_dataset(path)

    for scenario in small_grid:
        p = scenario.filter_params
        model = discretize(p)
        rows = frame[frame["scenario_id"] == scenario.id]
        x = rows[["if_a", "if_b", "vc_a", "vc_b", "vref_a", "vref_b"]].to_numpy()
        targets = rows["target"].to_numpy()
        for k in range(0, len(rows), 7):
            mpc = MpcState()
            if k > 0:
                mpc = MpcState(x[k - 1, 0:2].copy(), x[k - 1, 2:4].copy(), False)
            decision = control_step(mpc, x[k, 0:2], x[k, 2:4], x[k, 4:6], model, p)
            assert decision.optimal_index == targets[k], f"{scenario.id} row {k}"


def test_csv_round_trip_is_exact(collected, tmp_path):
    path = str(tmp_path / "data.csv")
    write_dataset(collected, path)
    back = read_dataset(path)
    pd.testing.assert_frame_equal(back, collected, check_dtype=False)

    again = str(tmp_path / "again.csv")
    write_dataset(back, again)
    assert open(path, "rb").read() == open(again, "rb").read()


def test_collect_is_reproducible(small_grid, collected):
    frame, _ = collect(small_grid, substeps=8)
    pd.testing.assert_frame_equal(frame, collected)


def test_empty_grid_gives_header_only(tmp_path):
    frame, failed = collect([], substeps=8)
    assert frame.empty and failed == []
    path = tmp_path / "empty.csv"
    write_dataset(frame, str(path))
    assert path.read_text() == ",".join(DATASET_COLUMNS) + "\n"
    assert len(read_dataset(str(path))) == 0


def _fail_on_bad(real):
    def run(scenario, controller, **options):
        if scenario.id == "BAD":
            raise SimulationDivergenceError("forced", scenario.id, step=3)
        return real(scenario, controller, **options)
    return run


def test_divergence_aborts_unless_keep_going(monkeypatch):
    monkeypatch.setattr(expert_module, "run_closed_loop",
                        _fail_on_bad(expert_module.run_closed_loop))
    grid = [make_scenario("BAD", cycles=0.2), make_scenario("OK", cycles=0.2)]

    with pytest.raises(SimulationDivergenceError) as info:
        collect(grid, substeps=4)
    assert info.value.last_good_step == 2

    frame, failed = collect(grid, substeps=4, keep_going=True)
    assert failed == ["BAD"]
    assert set(frame["scenario_id"]) == {"OK"}


@pytest.mark.parametrize("content, match", [
    ("", "empty"),
    ("a,b\n1,2\n", "header"),
    (",".join(DATASET_COLUMNS) + "\nS,0,1,1,1,1,1,1,1,1,9\n", "targets"),
    (",".join(DATASET_COLUMNS) + "\nS,0,,1,1,1,1,1,1,1,2\n", "missing"),
    (",".join(DATASET_COLUMNS) + "\nS,0,1,inf,1,1,1,1,1,1,2\n", "infinite"),
    (",".join(DATASET_COLUMNS) + "\nS,0,1,1,1,1,1,1,1,-inf,2\n", "infinite"),
])
def test_read_dataset_rejects(tmp_path, content, match):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DatasetError, match=match):
        read_dataset(str(path))


def test_delayed_features_reset_per_scenario():
    frame = pd.DataFrame({
        "scenario_id": ["A", "A", "B", "B"],
        "step": [0, 1, 0, 1],
        **{c: np.arange(4.0) + i for i, c in enumerate(DATASET_COLUMNS[2:-1])},
        "target": [0, 1, 2, 3],
    }, columns=DATASET_COLUMNS)

    x = build_features(frame, delayed=False)
    assert x.shape == (4, 8)
    xd = build_features(frame, delayed=True)
    assert xd.shape == (4, 16)
    np.testing.assert_array_equal(xd[:, :8], x)
    np.testing.assert_array_equal(xd[0, 8:], 0.0)
    np.testing.assert_array_equal(xd[1, 8:], x[0])
    np.testing.assert_array_equal(xd[2, 8:], 0.0)
    np.testing.assert_array_equal(xd[3, 8:], x[2])


def test_expert_dataset_items(collected):
    ds = ExpertDataset(collected)
    assert len(ds) == len(collected)
    features, target = ds[5]
    assert features.dtype == torch.float64 and features.shape == (8,)
    assert int(target) == collected["target"].iloc[5]
    assert ds.class_histogram().sum() == len(collected)
