import numpy as np
import pytest

from core.errors import InvalidParameterError
from core.loads import InductiveLoad
from core.loads import OpenCircuitLoad
from core.loads import RectifierLoad
from core.loads import ResistiveLoad
from core.loads import get_load


def test_get_load_kinds():
    assert isinstance(get_load({"kind": "resistive", "r_ohm": 10}), ResistiveLoad)
    assert isinstance(get_load({"kind": "open_circuit"}), OpenCircuitLoad)
    assert isinstance(get_load({"kind": "open"}), OpenCircuitLoad)
    assert isinstance(get_load({"kind": "Inductive", "l_h": 0.01}), InductiveLoad)

    rect = get_load({"kind": "rectifier", "r_nl_ohm": 60, "c_nl_uf": 300}, r_on=0.2)
    assert isinstance(rect, RectifierLoad)
    assert rect.c_nl == pytest.approx(300e-6)
    assert rect.r_on == pytest.approx(0.2)


@pytest.mark.parametrize("entry", [
    {"kind": "capacitive"},
    {"kind": "resistive"},
    {"kind": "resistive", "r_ohm": 0},
    {"kind": "inductive", "l_h": -1},
    {"kind": "rectifier", "r_nl_ohm": 60},
])
def test_get_load_rejects(entry):
    with pytest.raises(InvalidParameterError):
        get_load(entry)


def test_describe_strings():
    assert get_load({"kind": "resistive", "r_ohm": 1000}).describe() == "r_ohm=1000"
    assert get_load({"kind": "open_circuit"}).describe() == ""
    assert get_load({"kind": "inductive", "l_h": 0.01}).describe() == "l_h=0.01"
    assert get_load({"kind": "rectifier", "r_nl_ohm": 60, "c_nl_uf": 300}).describe() \
        == "r_nl_ohm=60;c_nl_uf=300"


def test_resistive_current_is_ohms_law():
    load = ResistiveLoad(20.0)
    np.testing.assert_allclose(load.output_current(np.array([200.0, -40.0]), None),
                               [10.0, -2.0])


def test_inductive_current_integrates_voltage():
    load = InductiveLoad(0.01)
    state = load.initial_state()
    np.testing.assert_array_equal(load.output_current(np.zeros(2), state), 0.0)
    np.testing.assert_allclose(load.derivative(np.array([100.0, 0.0]), state), [1e4, 0.0])


def test_rectifier_bus_discharges_through_resistor():
    load = RectifierLoad(60.0, 300e-6)
    v_dc = np.array([300.0])
    # all phases at zero: reverse-biased, only R_NL draws from the bus
    assert load.conduction(np.zeros(2), v_dc) == ()
    np.testing.assert_allclose(load.derivative(np.zeros(2), v_dc),
                               [-300.0 / 60.0 / 300e-6])


def test_linear_loads_flagged():
    assert ResistiveLoad(1.0).is_linear
    assert OpenCircuitLoad().is_linear
    assert InductiveLoad(1.0).is_linear
    assert not RectifierLoad(1.0, 1.0).is_linear
