# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Clarke-frame algebra for the two-level inverter.

alpha-beta quantities are plain numpy arrays of shape (2,) (or (N, 2) for
series); abc quantities are arrays of shape (3,) (or (N, 3)).
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from typing import NamedTuple

import numpy as np

from core.errors import InvalidParameterError


SQRT3 = np.sqrt(3.0)

CLARKE = (2.0 / 3.0) * np.array([
    [1.0, -0.5, -0.5],
    [0.0, SQRT3 / 2.0, -SQRT3 / 2.0],
])

INVERSE_CLARKE = np.array([
    [1.0, 0.0],
    [-0.5, SQRT3 / 2.0],
    [-0.5, -SQRT3 / 2.0],
])


class SwitchingState(NamedTuple):
    """One binary per inverter leg (upper switch on = 1)."""
    sa: int
    sb: int
    sc: int

    @property
    def index(self):
        return self.sa * 4 + self.sb * 2 + self.sc

    @classmethod
    def from_index(cls, index):
        if not 0 <= int(index) <= 7:
            raise InvalidParameterError(f"switching index {index} not in [0, 7]")
        index = int(index)
        return cls((index >> 2) & 1, (index >> 1) & 1, index & 1)

    def as_array(self):
        return np.array([self.sa, self.sb, self.sc], dtype=np.float64)


# v0, v1 .. v6 in the order they appear around the hexagon; (1,1,1) is never
# enumerated, (0,0,0) represents the zero vector.
CANONICAL_STATES = (
    SwitchingState(0, 0, 0),
    SwitchingState(1, 0, 0),
    SwitchingState(1, 1, 0),
    SwitchingState(0, 1, 0),
    SwitchingState(0, 1, 1),
    SwitchingState(0, 0, 1),
    SwitchingState(1, 0, 1),
)


def clarke(abc):
    """abc -> alpha-beta, amplitude invariant. Accepts (3,) or (N, 3)."""
    abc = np.asarray(abc, dtype=np.float64)
    return abc @ CLARKE.T


def inverse_clarke(ab):
    """alpha-beta -> abc assuming zero zero-sequence. Accepts (2,) or (N, 2)."""
    ab = np.asarray(ab, dtype=np.float64)
    return ab @ INVERSE_CLARKE.T


def _check_vdc(vdc):
    if not vdc > 0:
        raise InvalidParameterError(f"vdc must be > 0, got {vdc}")


def voltage_vector(state, vdc):
    _check_vdc(vdc)
    return vdc * clarke(SwitchingState(*state).as_array())


def enumerate_distinct_vectors(vdc):
    """Return the 7 distinct (state, vector) pairs in canonical order."""
    _check_vdc(vdc)
    return [(s, voltage_vector(s, vdc)) for s in CANONICAL_STATES]


def vector_table(vdc):
    """(7, 2) array of the canonical voltage vectors."""
    _check_vdc(vdc)
    states = np.array([s.as_array() for s in CANONICAL_STATES])
    return vdc * clarke(states)
