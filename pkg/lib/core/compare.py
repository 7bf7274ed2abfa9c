# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Side-by-side MPC / ANN runs over a scenario list."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from core.errors import NumericalError
from core.errors import ThdWindowError
from core.evaluate import record_thd
from core.evaluate import settling_time
from core.inference import AnnController
from core.mpc import MpcController
from core.simulate import run_closed_loop
from utils.utils import map_ordered


logger = logging.getLogger(__name__)

COMPARE_COLUMNS = [
    "sample", "load_kind", "load_params", "ts_us", "l_mh", "c_uf", "vdc",
    "vref", "thd_ann", "thd_mpc", "tss_mpc_ms", "tss_ann_ms", "status",
]


@dataclass
class EvalSettings:
    start_cycle: int = 3
    min_cycles: int = 4
    max_cycles: int = 12
    max_harmonic: Optional[int] = 50  # None: up to Nyquist
    settling_band: float = 0.05
    stress_thd: float = 10.0
    io_source: str = "measured"

    @classmethod
    def from_config(cls, cfg):
        return cls(
            start_cycle=cfg.EVAL.THD_START_CYCLE,
            min_cycles=cfg.EVAL.THD_CYCLES,
            max_cycles=cfg.EVAL.THD_MAX_CYCLES,
            max_harmonic=cfg.EVAL.MAX_HARMONIC,
            settling_band=cfg.EVAL.SETTLING_BAND,
            stress_thd=cfg.EVAL.STRESS_THD,
            io_source=cfg.ANN.IO_SOURCE,
        )


def record_metrics(record, settings):
    """THD of phase a in percent and settling time in ms."""
    report = record_thd(
        record, settings.start_cycle, settings.min_cycles,
        settings.max_cycles, settings.max_harmonic)
    tss = settling_time(record, settings.settling_band)
    return report.thd_percent, tss * 1e3


def _run_one(scenario, controller, options, settings):
    try:
        record = run_closed_loop(scenario, controller, **options)
        thd_pct, tss_ms = record_metrics(record, settings)
    except (NumericalError, ThdWindowError) as e:
        return None, math.nan, math.nan, f"{controller.name}_failed: {e}"
    return record, thd_pct, tss_ms, None


def _compare_one(job):
    scenario, model, options, settings = job
    mpc = MpcController(scenario.filter_params)
    ann = AnnController(model, scenario.filter_params, settings.io_source)

    rec_mpc, thd_mpc, tss_mpc, err_mpc = _run_one(scenario, mpc, options, settings)
    rec_ann, thd_ann, tss_ann, err_ann = _run_one(scenario, ann, options, settings)

    errors = [e for e in (err_mpc, err_ann) if e]
    if errors:
        status = "; ".join(errors)
    elif max(thd_ann, thd_mpc) > settings.stress_thd:
        status = f"stressed: thd > {settings.stress_thd:g}%"
    else:
        status = "ok"

    load = scenario.build_load()
    row = dict(
        sample=scenario.id,
        load_kind=load.kind,
        load_params=load.describe(),
        ts_us=scenario.ts_us,
        l_mh=scenario.l_mh,
        c_uf=scenario.c_uf,
        vdc=scenario.vdc_v,
        vref=scenario.vref_v,
        thd_ann=thd_ann,
        thd_mpc=thd_mpc,
        tss_mpc_ms=tss_mpc,
        tss_ann_ms=tss_ann,
        status=status,
    )
    return row, rec_mpc, rec_ann


def compare_controllers(scenarios, model, options=None, settings=None,
                        workers=1, waveform_dir=None):
    """One row per scenario, in input order. Rows that fail keep NaN metrics
    and say why in `status`; per-step waveforms go to `waveform_dir` when set.
    """
    options = options or {}
    settings = settings or EvalSettings()
    jobs = [(scenario, model, options, settings) for scenario in scenarios]

    rows = []
    for row, rec_mpc, rec_ann in map_ordered(_compare_one, jobs, workers):
        logger.info(
            f"=> {row['sample']}: THD mpc {row['thd_mpc']:.2f}% "
            f"ann {row['thd_ann']:.2f}% [{row['status']}]")
        rows.append(row)
        if waveform_dir is not None:
            for record in (rec_mpc, rec_ann):
                if record is not None:
                    record.to_frame().to_csv(
                        os.path.join(waveform_dir,
                                     f"{record.scenario_id}_{record.controller}.csv"),
                        index=False, float_format="%.17g", lineterminator="\n")

    return pd.DataFrame(rows, columns=COMPARE_COLUMNS)


def summarize(table):
    """Median THD per controller and ANN win rate over rows where both ran."""
    done = table.dropna(subset=["thd_ann", "thd_mpc"])
    n = len(done)
    wins = int((done["thd_ann"] < done["thd_mpc"]).sum())
    stressed = int(table["status"].astype(str).str.startswith("stressed").sum())
    return dict(
        rows=int(len(table)),
        completed=n,
        failed=int(len(table) - n),
        stressed=stressed,
        median_thd_mpc=float(np.median(done["thd_mpc"])) if n else math.nan,
        median_thd_ann=float(np.median(done["thd_ann"])) if n else math.nan,
        ann_wins=wins,
        ann_win_rate=wins / n if n else math.nan,
        median_tss_mpc_ms=float(np.median(done["tss_mpc_ms"])) if n else math.nan,
        median_tss_ann_ms=float(np.median(done["tss_ann_ms"])) if n else math.nan,
    )
