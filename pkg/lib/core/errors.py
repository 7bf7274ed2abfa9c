# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Exception hierarchy shared by the library and the entry scripts.

Entry scripts map these onto exit codes: InputError -> 2, NumericalError -> 3.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function


class InputError(ValueError):
    pass


class InvalidParameterError(InputError):
    pass


class ScenarioError(InputError):
    pass


class ModelFormatError(InputError):
    pass


class DatasetError(InputError):
    pass


class ThdWindowError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


class SimulationDivergenceError(NumericalError):
    def __init__(self, message, scenario_id=None, step=None):
        self.message = message
        self.scenario_id = scenario_id
        self.step = step
        self.last_good_step = None if step is None else step - 1
        prefix = f"[{scenario_id}] " if scenario_id is not None else ""
        super().__init__(
            f"{prefix}{message} (step={step}, last_good_step={self.last_good_step})"
        )

    def __reduce__(self):
        return self.__class__, (self.message, self.scenario_id, self.step)


class TrainingDivergenceError(NumericalError):
    def __init__(self, epoch, loss, state=None):
        self.epoch = epoch
        self.loss = loss
        self.state = state or {}
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.state.items()))
        super().__init__(
            f"non-finite loss {loss} at epoch {epoch}" +
            (f" ({details})" if details else "")
        )

    def __reduce__(self):
        return self.__class__, (self.epoch, self.loss, self.state)
