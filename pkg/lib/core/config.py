# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import copy
import os
import sys
from dataclasses import asdict, dataclass, field

import yaml
from easydict import EasyDict as edict

from core.errors import InputError
from core.errors import ScenarioError
from core.loads import get_load
from core.plant import FilterParams


config = edict()

config.OUTPUT_DIR = "output"
config.LOG_DIR = "log"
config.WORKERS = 1
config.SEED = 0
config.PRINT_FREQ = 20

# truth integration and closed-loop harness
config.SIM = edict()
config.SIM.SUBSTEPS = 32
config.SIM.REFERENCE_ADVANCE = False
config.SIM.RECTIFIER_R_ON = 0.1
config.SIM.BLOWUP_FACTOR = 2.0
config.SIM.DEFAULT_CYCLES = 10

# common params for NETWORK
config.MODEL = edict()
config.MODEL.NAME = "shallow_mlp"
config.MODEL.NUM_HIDDEN = 15
config.MODEL.NUM_CLASSES = 7
config.MODEL.ACTIVATION = "tanh"  # tanh, logistic
config.MODEL.DELAYED_FEATURES = False

# train
config.TRAIN = edict()
config.TRAIN.MAX_EPOCHS = 2000
config.TRAIN.PATIENCE = 50
config.TRAIN.TRAIN_FRACTION = 0.7
config.TRAIN.VALIDATION_FRACTION = 0.15
config.TRAIN.SIGMA = 1e-4
config.TRAIN.LAMBDA = 1e-6

# deployed network
config.ANN = edict()
config.ANN.IO_SOURCE = "measured"  # measured, estimated

# THD / settling evaluation
config.EVAL = edict()
config.EVAL.THD_START_CYCLE = 3
config.EVAL.THD_CYCLES = 4
config.EVAL.THD_MAX_CYCLES = 12
config.EVAL.MAX_HARMONIC = 50  # null: every harmonic below Nyquist
config.EVAL.SETTLING_BAND = 0.05
config.EVAL.STRESS_THD = 10.0

# debug
config.DEBUG = edict()
config.DEBUG.SAVE_WAVEFORM_PLOTS = False

_DEFAULTS = copy.deepcopy(config)


def _update_dict(k, v):
    for vk, vv in v.items():
        if vk in config[k]:
            config[k][vk] = vv
        else:
            raise ValueError(f"{k}.{vk} not exist in config.py")


def update_config(config_file):
    with open(config_file) as f:
        exp_config = edict(yaml.safe_load(f) or {})
        for k, v in exp_config.items():
            if k in config:
                if isinstance(v, dict):
                    _update_dict(k, v)
                else:
                    config[k] = v
            else:
                raise ValueError(f"{k} not exist in config.py")

    if config.MODEL.ACTIVATION not in ("tanh", "logistic"):
        raise ValueError(f"Unknown activation: {config.MODEL.ACTIVATION}")
    if config.ANN.IO_SOURCE not in ("measured", "estimated"):
        raise ValueError(f"Unknown ANN.IO_SOURCE: {config.ANN.IO_SOURCE}")


def restore_defaults():
    for k, v in copy.deepcopy(_DEFAULTS).items():
        config[k] = v


def gen_config(config_file):
    cfg = dict(config)
    for k, v in cfg.items():
        if isinstance(v, edict):
            cfg[k] = dict(v)

    with open(config_file, "w") as f:
        yaml.dump(dict(cfg), f, default_flow_style=False)


def reset_config(cfg, args):
    """Apply the command-line overrides shared by every entry point."""
    for name, key in (("substeps", ("SIM", "SUBSTEPS")),
                      ("workers", ("WORKERS",)),
                      ("seed", ("SEED",)),
                      ("io_source", ("ANN", "IO_SOURCE"))):
        value = getattr(args, name, None)
        if value is None:
            continue
        if len(key) == 1:
            cfg[key[0]] = value
        else:
            cfg[key[0]][key[1]] = value
    if getattr(args, "reference_advance", False):
        cfg.SIM.REFERENCE_ADVANCE = True
    if getattr(args, "delayed_features", False):
        cfg.MODEL.DELAYED_FEATURES = True
    if getattr(args, "activation", None):
        cfg.MODEL.ACTIVATION = args.activation

    if cfg.SIM.SUBSTEPS < 1:
        raise InputError(f"--substeps must be >= 1, got {cfg.SIM.SUBSTEPS}")
    if cfg.WORKERS < 1:
        raise InputError(f"--workers must be >= 1, got {cfg.WORKERS}")


def get_model_name(cfg):
    name = cfg.MODEL.NAME
    n_in = 16 if cfg.MODEL.DELAYED_FEATURES else 8
    full_name = f"{name}_{n_in}-{cfg.MODEL.NUM_HIDDEN}-{cfg.MODEL.NUM_CLASSES}" \
        f"_{cfg.MODEL.ACTIVATION}"
    return name, full_name


# ------------------------------------------------------------------------------
# scenario files
# ------------------------------------------------------------------------------

_SCENARIO_KEYS = {"id", "load", "ts_us", "l_mh", "c_uf", "vdc_v", "vref_v",
                  "freq_hz", "cycles"}


@dataclass(frozen=True)
class ScenarioConfig:
    id: str
    load: dict
    ts_us: float
    l_mh: float
    c_uf: float
    vdc_v: float
    vref_v: float
    freq_hz: float = 50.0
    cycles: float = 10.0
    _params: FilterParams = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.load, dict) or "kind" not in self.load:
            raise ScenarioError(f"{self.id}: load must be a mapping with 'kind'")
        for name in ("vref_v", "freq_hz", "cycles"):
            value = getattr(self, name)
            if not value > 0:
                raise ScenarioError(f"{self.id}: {name} must be > 0, got {value}")
        try:
            params = FilterParams.from_units(
                self.l_mh, self.c_uf, self.ts_us, self.vdc_v)
            get_load(self.load)
        except InputError as e:
            raise ScenarioError(f"{self.id}: {e}")
        object.__setattr__(self, "_params", params)

    @property
    def filter_params(self):
        return self._params

    @property
    def ts(self):
        return self._params.ts

    @property
    def n_steps(self):
        return int(round(self.cycles / (self.freq_hz * self.ts)))

    def build_load(self, r_on=0.1):
        return get_load(self.load, r_on=r_on)

    def load_label(self):
        return self.build_load().describe()

    def to_dict(self):
        d = asdict(self)
        d.pop("_params")
        return d

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - _SCENARIO_KEYS
        if unknown:
            raise ScenarioError(
                f"{d.get('id', '?')}: unknown scenario keys {sorted(unknown)}")
        missing = (_SCENARIO_KEYS - {"freq_hz", "cycles"}) - set(d)
        if missing:
            raise ScenarioError(
                f"{d.get('id', '?')}: missing scenario keys {sorted(missing)}")
        try:
            numeric = {k: float(d[k]) for k in _SCENARIO_KEYS - {"id", "load"}
                       if k in d}
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"{d.get('id', '?')}: {e}")
        return cls(id=str(d["id"]), load=dict(d["load"]), **numeric)


def _expand_grid(grid):
    prefix = grid.get("prefix", "G")
    loads = grid.get("loads") or []
    conditions = grid.get("conditions") or []
    entries = []
    # condition-major: every load under condition 1, then condition 2, ...
    for ci, cond in enumerate(conditions):
        for li, load in enumerate(loads):
            entry = dict(cond)
            entry["load"] = load
            entry["id"] = f"{prefix}{ci + 1:02d}_{li + 1:02d}"
            entries.append(entry)
    return entries


def load_scenarios(path, default_cycles=None):
    if not os.path.exists(path):
        raise FileNotFoundError(f"scenario file not found: {path}")
    with open(path) as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ScenarioError(f"{path}: {e}")
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be a mapping")

    defaults = dict(data.get("defaults") or {})
    if default_cycles is not None:
        defaults.setdefault("cycles", default_cycles)
    entries = list(data.get("scenarios") or [])
    if data.get("grid"):
        entries += _expand_grid(data["grid"])

    scenarios = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise ScenarioError(f"{path}: scenario entries must be mappings")
        scenarios.append(ScenarioConfig.from_dict({**defaults, **entry}))

    ids = [s.id for s in scenarios]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise ScenarioError(f"{path}: duplicate scenario ids {duplicates}")
    return scenarios


if __name__ == "__main__":
    gen_config(sys.argv[1])
