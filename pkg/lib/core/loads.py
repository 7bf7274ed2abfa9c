# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Load models attached to the filter capacitor.

Every load exposes the same small interface used by the truth integrator:

  output_current(v_c, load_state, conduction=None) -> alpha-beta i_o
  derivative(v_c, load_state, conduction)          -> d(load_state)/dt
  conduction(v_c, load_state)                       -> switching context held
                                                       over one RK4 substep

Linear loads additionally provide `channel_matrices(params)`, the per-channel
continuous system z' = M z + N v_i with z = (i_f, v_c, load channel states).
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np

from core.errors import InvalidParameterError
from core.frames import clarke
from core.frames import inverse_clarke


_EMPTY = np.zeros(0)


def _positive(name, value):
    if not value > 0 or not np.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite and > 0, got {value}")
    return float(value)


class ResistiveLoad(object):
    kind = "resistive"
    n_states = 0
    is_linear = True

    def __init__(self, r):
        self.r = _positive("r", r)

    def initial_state(self):
        return _EMPTY.copy()

    def conduction(self, v_c, load_state):
        return None

    def output_current(self, v_c, load_state, conduction=None):
        return np.asarray(v_c) / self.r

    def derivative(self, v_c, load_state, conduction=None):
        return _EMPTY

    def channel_matrices(self, params):
        m = np.array([
            [0.0, -1.0 / params.l],
            [1.0 / params.c, -1.0 / (self.r * params.c)],
        ])
        n = np.array([1.0 / params.l, 0.0])
        return m, n

    def describe(self):
        return f"r_ohm={self.r:g}"


class OpenCircuitLoad(object):
    kind = "open_circuit"
    n_states = 0
    is_linear = True

    def initial_state(self):
        return _EMPTY.copy()

    def conduction(self, v_c, load_state):
        return None

    def output_current(self, v_c, load_state, conduction=None):
        return np.zeros(2)

    def derivative(self, v_c, load_state, conduction=None):
        return _EMPTY

    def channel_matrices(self, params):
        m = np.array([
            [0.0, -1.0 / params.l],
            [1.0 / params.c, 0.0],
        ])
        n = np.array([1.0 / params.l, 0.0])
        return m, n

    def describe(self):
        return ""


class InductiveLoad(object):
    """Pure inductor per phase; state is the alpha-beta load current."""
    kind = "inductive"
    n_states = 2
    is_linear = True

    def __init__(self, l_load):
        self.l_load = _positive("l_load", l_load)

    def initial_state(self):
        return np.zeros(2)

    def conduction(self, v_c, load_state):
        return None

    def output_current(self, v_c, load_state, conduction=None):
        return np.asarray(load_state, dtype=np.float64)[:2]

    def derivative(self, v_c, load_state, conduction=None):
        return np.asarray(v_c) / self.l_load

    def channel_matrices(self, params):
        m = np.array([
            [0.0, -1.0 / params.l, 0.0],
            [1.0 / params.c, 0.0, -1.0 / params.c],
            [0.0, 1.0 / self.l_load, 0.0],
        ])
        n = np.array([1.0 / params.l, 0.0, 0.0])
        return m, n

    def describe(self):
        return f"l_h={self.l_load:g}"


class RectifierLoad(object):
    """Six-pulse diode bridge feeding R_NL || C_NL.

    The conducting pair is the phase with the highest and the phase with the
    lowest capacitor voltage; the bridge conducts only while their line-to-line
    voltage exceeds the DC-bus voltage. The pair is joined to the bus through
    `r_on`, which keeps the model an ordinary ODE.
    """
    kind = "rectifier"
    n_states = 1
    is_linear = False

    def __init__(self, r_nl, c_nl, r_on=0.1):
        self.r_nl = _positive("r_nl", r_nl)
        self.c_nl = _positive("c_nl", c_nl)
        self.r_on = _positive("r_on", r_on)

    def initial_state(self):
        return np.zeros(1)

    def conduction(self, v_c, load_state):
        v_abc = inverse_clarke(v_c)
        hi = int(np.argmax(v_abc))
        lo = int(np.argmin(v_abc))
        if v_abc[hi] - v_abc[lo] > load_state[0]:
            return (hi, lo)
        return ()

    def dc_current(self, v_c, load_state, conduction=None):
        if conduction is None:
            conduction = self.conduction(v_c, load_state)
        if not conduction:
            return 0.0
        hi, lo = conduction
        v_abc = inverse_clarke(v_c)
        return max((v_abc[hi] - v_abc[lo] - load_state[0]) / self.r_on, 0.0)

    def output_current(self, v_c, load_state, conduction=None):
        if conduction is None:
            conduction = self.conduction(v_c, load_state)
        i_dc = self.dc_current(v_c, load_state, conduction)
        i_abc = np.zeros(3)
        if i_dc > 0.0:
            hi, lo = conduction
            i_abc[hi] += i_dc
            i_abc[lo] -= i_dc
        return clarke(i_abc)

    def derivative(self, v_c, load_state, conduction=None):
        i_dc = self.dc_current(v_c, load_state, conduction)
        return np.array([(i_dc - load_state[0] / self.r_nl) / self.c_nl])

    def describe(self):
        return f"r_nl_ohm={self.r_nl:g};c_nl_uf={self.c_nl * 1e6:g}"


def get_load(entry, r_on=0.1):
    """Build a load from a scenario-file mapping (`kind` plus unit keys)."""
    kind = str(entry.get("kind", "")).lower()
    try:
        if kind == "resistive":
            return ResistiveLoad(float(entry["r_ohm"]))
        elif kind in ("open_circuit", "open"):
            return OpenCircuitLoad()
        elif kind == "inductive":
            return InductiveLoad(float(entry["l_h"]))
        elif kind == "rectifier":
            return RectifierLoad(
                float(entry["r_nl_ohm"]),
                float(entry["c_nl_uf"]) * 1e-6,
                r_on=float(entry.get("r_on_ohm", r_on)),
            )
    except KeyError as e:
        raise InvalidParameterError(f"load '{kind}' is missing key {e}")
    raise InvalidParameterError(f"Unknown load kind: {kind!r}")
