# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import sys

import _init_paths  # noqa: F401
from common import add_sim_args
from common import make_parser
from core.compare import EvalSettings
from core.compare import record_metrics
from core.config import config
from core.config import load_scenarios
from core.config import reset_config
from core.errors import ScenarioError
from core.evaluate import rms_tracking_error
from core.inference import AnnController
from core.mpc import MpcController
from core.simulate import run_closed_loop
from core.simulate import sim_options
from models.mlp import load_model
from utils.utils import create_logger
from utils.utils import dump_json
from utils.utils import run_guarded
from utils.utils import write_manifest
from utils.vis import save_waveform_plot


def parse_args(argv=None):
    parser = make_parser('Run one scenario in closed loop', argv)
    parser.add_argument('--scenarios',
                        help='scenario YAML file',
                        required=True,
                        type=str)
    parser.add_argument('--scenario-id',
                        help='scenario to run (default: first in the file)',
                        type=str)
    parser.add_argument('--controller',
                        help='controller in the loop',
                        choices=['mpc', 'ann'],
                        required=True)
    parser.add_argument('--model',
                        help='model file, required for --controller ann',
                        type=str)
    parser.add_argument('--io-source',
                        help='output current fed to the network',
                        choices=['measured', 'estimated'],
                        type=str)
    parser.add_argument('--output-dir',
                        help='where waveforms and metrics go',
                        default=config.OUTPUT_DIR,
                        type=str)
    parser.add_argument('--plot',
                        help='save a waveform plot',
                        action='store_true')
    add_sim_args(parser)
    args = parser.parse_args(argv)
    if args.controller == 'ann' and not args.model:
        parser.error('--controller ann needs --model')
    return args


def main(argv=None):
    args = parse_args(argv)
    reset_config(config, args)
    os.makedirs(args.output_dir, exist_ok=True)
    logger, _ = create_logger(
        config, args.cfg or 'default', args.output_dir, 'simulate')

    scenarios = load_scenarios(args.scenarios, default_cycles=args.cycles)
    if args.scenario_id:
        scenarios = [s for s in scenarios if s.id == args.scenario_id]
        if not scenarios:
            raise ScenarioError(f"{args.scenarios}: no scenario {args.scenario_id!r}")
    if not scenarios:
        raise ScenarioError(f"{args.scenarios}: no scenarios")
    scenario = scenarios[0]

    inputs = {'scenarios': args.scenarios}
    if args.controller == 'ann':
        controller = AnnController(
            load_model(args.model), scenario.filter_params, config.ANN.IO_SOURCE)
        inputs['model'] = args.model
    else:
        controller = MpcController(scenario.filter_params)

    record = run_closed_loop(scenario, controller, **sim_options(config))
    thd_pct, tss_ms = record_metrics(record, EvalSettings.from_config(config))

    stem = os.path.join(args.output_dir, f"{scenario.id}_{args.controller}")
    record.to_frame().to_csv(
        stem + '.csv', index=False, float_format='%.17g', lineterminator='\n')
    metrics = dict(
        scenario=scenario.to_dict(),
        controller=args.controller,
        steps=record.n_steps,
        thd_percent=thd_pct,
        settling_time_ms=tss_ms,
        rms_tracking_error=rms_tracking_error(record, config.EVAL.THD_START_CYCLE),
    )
    dump_json(metrics, stem + '.metrics.json')
    outputs = {'waveforms': stem + '.csv', 'metrics': stem + '.metrics.json'}
    if args.plot or config.DEBUG.SAVE_WAVEFORM_PLOTS:
        save_waveform_plot(record, stem + '.png')
    write_manifest(stem + '.manifest.json', command='simulate',
                   inputs=inputs, outputs=outputs)

    logger.info(
        f"=> {scenario.id} [{args.controller}] THD {thd_pct:.2f}% "
        f"settling {tss_ms:.2f} ms")
    return 0


if __name__ == '__main__':
    sys.exit(run_guarded(main))
