# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""LC filter models.

The discrete model (exact zero-order hold) is what the predictive controller
uses; `TruthModel` integrates filter + load with fixed-step RK4 and plays the
role of the simulated inverter.

Per-channel state ordering is (i_f, v_c); alpha and beta channels share the
same matrices.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from dataclasses import dataclass, field

import numpy as np

from core.errors import InvalidParameterError
from core.frames import SwitchingState
from core.frames import voltage_vector


@dataclass(frozen=True)
class FilterParams:
    l: float
    c: float
    ts: float
    vdc: float

    def __post_init__(self):
        for name in ("l", "c", "ts", "vdc"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidParameterError(
                    f"FilterParams.{name} must be finite and > 0, got {value}")
        if self.omega0 * self.ts >= np.pi:
            raise InvalidParameterError(
                f"omega0*ts = {self.omega0 * self.ts:.4f} >= pi "
                f"(l={self.l}, c={self.c}, ts={self.ts})")

    @property
    def omega0(self):
        return 1.0 / np.sqrt(self.l * self.c)

    @classmethod
    def from_units(cls, l_mh, c_uf, ts_us, vdc_v):
        return cls(l=l_mh * 1e-3, c=c_uf * 1e-6, ts=ts_us * 1e-6, vdc=float(vdc_v))


@dataclass(frozen=True)
class DiscreteModel:
    aq: np.ndarray
    bq: np.ndarray
    bdq: np.ndarray


@dataclass
class PlantState:
    i_f: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v_c: np.ndarray = field(default_factory=lambda: np.zeros(2))
    load_state: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def as_vector(self):
        return np.concatenate([self.i_f, self.v_c, self.load_state])

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=np.float64)
        return cls(x[0:2].copy(), x[2:4].copy(), x[4:].copy())

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_vector())))


def continuous_matrices(p):
    """A, B and B_d of the lossless LC filter."""
    a = np.array([[0.0, -1.0 / p.l], [1.0 / p.c, 0.0]])
    b = np.array([1.0 / p.l, 0.0])
    b_d = np.array([0.0, -1.0 / p.c])
    return a, b, b_d


def discretize(p):
    """Exact ZOH model. Uses A^2 = -omega0^2 I to write exp(A t) in closed form."""
    if not isinstance(p, FilterParams):
        raise InvalidParameterError(f"expected FilterParams, got {type(p).__name__}")
    a, b, b_d = continuous_matrices(p)
    w0 = p.omega0
    wt = w0 * p.ts
    eye = np.eye(2)

    aq = np.cos(wt) * eye + (np.sin(wt) / w0) * a
    # integral of exp(A tau) over [0, ts]; 1 - cos written as 2 sin^2 for accuracy
    integral = (np.sin(wt) / w0) * eye + (2.0 * np.sin(wt / 2.0) ** 2 / w0 ** 2) * a

    return DiscreteModel(aq=aq, bq=integral @ b, bdq=integral @ b_d)


def predict(m, i_f, v_c, v_i, i_o):
    """One step of x(k+1) = Aq x + Bq v_i + Bdq i_o, channel-wise."""
    x = np.vstack([i_f, v_c])
    nxt = m.aq @ x + np.outer(m.bq, v_i) + np.outer(m.bdq, i_o)
    return nxt[0], nxt[1]


def estimate_output_current(i_f_prev, v_c_now, v_c_prev, p):
    return (np.asarray(i_f_prev, dtype=np.float64)
            - (p.c / p.ts) * (np.asarray(v_c_now) - np.asarray(v_c_prev)))


def stored_energy(state, p):
    return 0.5 * p.l * float(state.i_f @ state.i_f) + \
        0.5 * p.c * float(state.v_c @ state.v_c)


def rk4_step(fun, x, h):
    k1 = fun(x)
    k2 = fun(x + 0.5 * h * k1)
    k3 = fun(x + 0.5 * h * k2)
    k4 = fun(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def precompose_rk4(m, n, h, substeps):
    """Collapse `substeps` RK4 steps of z' = M z + N u (u held) into z+ = Phi z + Gamma u."""
    dim = m.shape[0]
    eye = np.eye(dim)
    hm = h * m
    hm2 = hm @ hm
    hm3 = hm2 @ hm
    p_sub = eye + hm + hm2 / 2.0 + hm3 / 6.0 + (hm3 @ hm) / 24.0
    g_sub = h * (eye + hm / 2.0 + hm2 / 6.0 + hm3 / 24.0) @ n

    phi = eye.copy()
    gamma = np.zeros(dim)
    for _ in range(substeps):
        phi = p_sub @ phi
        gamma = p_sub @ gamma + g_sub
    return phi, gamma


class TruthModel(object):
    """Filter + load integrated over one sampling period with the inverter
    output held constant.

    Linear loads use the pre-composed RK4 map unless `precompose` is False;
    non-linear loads re-resolve their conduction context at every substep.
    """

    def __init__(self, params, load, substeps=32, precompose=True):
        if int(substeps) < 1:
            raise InvalidParameterError(f"substeps must be >= 1, got {substeps}")
        self.params = params
        self.load = load
        self.substeps = int(substeps)
        self.h = params.ts / self.substeps
        self._phi = None
        self._gamma = None
        if precompose and load.is_linear:
            m, n = load.channel_matrices(params)
            self._phi, self._gamma = precompose_rk4(m, n, self.h, self.substeps)

    def initial_state(self):
        return PlantState(np.zeros(2), np.zeros(2), self.load.initial_state())

    def output_current(self, state):
        return self.load.output_current(state.v_c, state.load_state)

    def _rhs(self, x, v_i, conduction):
        v_c = x[2:4]
        load_state = x[4:]
        i_o = self.load.output_current(v_c, load_state, conduction)
        return np.concatenate([
            (v_i - v_c) / self.params.l,
            (x[0:2] - i_o) / self.params.c,
            self.load.derivative(v_c, load_state, conduction),
        ])

    def step(self, state, applied):
        v_i = voltage_vector(applied, self.params.vdc)

        if self._phi is not None:
            z = np.vstack([state.i_f, state.v_c, state.load_state.reshape(-1, 2)])
            z = self._phi @ z + np.outer(self._gamma, v_i)
            return PlantState(z[0].copy(), z[1].copy(), z[2:].reshape(-1).copy())

        x = state.as_vector()
        for _ in range(self.substeps):
            conduction = self.load.conduction(x[2:4], x[4:])
            x = rk4_step(lambda y: self._rhs(y, v_i, conduction), x, self.h)
        return PlantState.from_vector(x)


def step_truth(state, applied, p, load, substeps=32):
    return TruthModel(p, load, substeps).step(state, SwitchingState(*applied))
