# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""THD of one column of a waveform CSV (as written by simulate/compare)."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import sys

import numpy as np
import pandas as pd

import _init_paths  # noqa: F401
from common import make_parser
from core.config import config
from core.errors import DatasetError
from core.evaluate import integer_cycle_window
from core.evaluate import thd
from utils.utils import dump_json
from utils.utils import run_guarded
from utils.utils import write_manifest
from utils.vis import save_thd_plot


def parse_args(argv=None):
    parser = make_parser('Harmonic analysis of a sampled waveform', argv)
    parser.add_argument('--input',
                        help='waveform CSV',
                        required=True,
                        type=str)
    parser.add_argument('--column',
                        help='signal column',
                        default='vc_phase_a',
                        type=str)
    parser.add_argument('--ts-us',
                        help='sampling period; default: from the t column',
                        type=float)
    parser.add_argument('--freq',
                        help='fundamental frequency in Hz',
                        default=50.0,
                        type=float)
    parser.add_argument('--start-cycle',
                        default=config.EVAL.THD_START_CYCLE,
                        type=int)
    parser.add_argument('--cycles',
                        help='minimum window length in cycles',
                        default=config.EVAL.THD_CYCLES,
                        type=int)
    parser.add_argument('--max-harmonic',
                        default=config.EVAL.MAX_HARMONIC,
                        type=int)
    parser.add_argument('--full-band',
                        help='sum every harmonic below Nyquist',
                        action='store_true')
    parser.add_argument('--output',
                        help='JSON report to write',
                        type=str)
    parser.add_argument('--plot',
                        help='harmonic spectrum PNG to write',
                        type=str)
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    frame = pd.read_csv(args.input, float_precision='round_trip')
    if args.column not in frame.columns:
        raise DatasetError(f"{args.input}: no column {args.column!r}")

    if args.ts_us is not None:
        ts = args.ts_us * 1e-6
    elif 't' in frame.columns and len(frame) > 1:
        ts = float(np.median(np.diff(frame['t'].to_numpy())))
    else:
        raise DatasetError(f"{args.input}: no t column, pass --ts-us")

    start, samples, f1 = integer_cycle_window(
        ts, args.freq, args.start_cycle, args.cycles, config.EVAL.THD_MAX_CYCLES)
    signal = frame[args.column].to_numpy(dtype=np.float64)[start:start + samples]
    if signal.size < samples:
        raise DatasetError(
            f"{args.input}: {len(frame)} samples, window needs {start + samples}")
    max_harmonic = None if args.full_band else args.max_harmonic
    report = thd(signal, ts, f1, max_harmonic)

    print(f"fundamental {report.fundamental_hz:.4f} Hz, "
          f"amplitude {report.fundamental_amplitude:.4f}")
    print(f"THD {report.thd_percent:.4f}%")
    if args.output:
        dump_json(dict(
            input=args.input, column=args.column, ts=ts,
            window_start=start, window_samples=samples,
            fundamental_hz=report.fundamental_hz,
            fundamental_amplitude=report.fundamental_amplitude,
            thd=report.thd,
            harmonics={int(h): float(a)
                       for h, a in zip(report.orders, report.amplitudes)},
        ), args.output)
    outputs = {}
    if args.output:
        outputs['report'] = args.output
    if args.plot:
        save_thd_plot(report, args.plot, args.column)
        outputs['plot'] = args.plot
    if outputs:
        stem = os.path.splitext(args.output or args.plot)[0]
        write_manifest(stem + '.manifest.json', command='thd',
                       inputs=dict(waveform=args.input), outputs=outputs,
                       column=args.column, window_start=start,
                       window_samples=samples)
    return 0


if __name__ == '__main__':
    sys.exit(run_guarded(main))
