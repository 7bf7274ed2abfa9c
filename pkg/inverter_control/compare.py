# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import sys

import _init_paths  # noqa: F401
from common import add_scenario_args
from common import add_sim_args
from common import make_parser
from core.compare import EvalSettings
from core.compare import compare_controllers
from core.compare import summarize
from core.config import config
from core.config import load_scenarios
from core.config import reset_config
from core.simulate import sim_options
from models.mlp import load_model
from utils.utils import create_logger
from utils.utils import dump_json
from utils.utils import run_guarded
from utils.utils import write_manifest


def parse_args(argv=None):
    parser = make_parser('Compare MPC and the trained network scenario by scenario', argv)
    add_scenario_args(parser)
    add_sim_args(parser)
    parser.add_argument('--model',
                        help='model file written by train',
                        required=True,
                        type=str)
    parser.add_argument('--io-source',
                        help='output current fed to the network',
                        choices=['measured', 'estimated'],
                        type=str)
    parser.add_argument('--output-dir',
                        help='where the table and summary go',
                        default=config.OUTPUT_DIR,
                        type=str)
    parser.add_argument('--waveforms',
                        help='also write per-step CSVs for every run',
                        action='store_true')
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    reset_config(config, args)
    os.makedirs(args.output_dir, exist_ok=True)
    logger, _ = create_logger(
        config, args.cfg or 'default', args.output_dir, 'compare')

    scenarios = load_scenarios(args.scenarios, default_cycles=args.cycles)
    model = load_model(args.model)

    waveform_dir = None
    if args.waveforms:
        waveform_dir = os.path.join(args.output_dir, 'waveforms')
        os.makedirs(waveform_dir, exist_ok=True)

    table = compare_controllers(
        scenarios, model,
        options=sim_options(config),
        settings=EvalSettings.from_config(config),
        workers=config.WORKERS,
        waveform_dir=waveform_dir,
    )
    table_file = os.path.join(args.output_dir, 'compare.csv')
    table.to_csv(table_file, index=False, float_format='%.6f', lineterminator='\n')

    summary = summarize(table)
    summary_file = os.path.join(args.output_dir, 'summary.json')
    dump_json(summary, summary_file)
    write_manifest(
        os.path.join(args.output_dir, 'compare.manifest.json'),
        command='compare',
        inputs={'scenarios': args.scenarios, 'model': args.model},
        outputs={'table': table_file, 'summary': summary_file},
    )

    print(f"rows: {summary['rows']} (completed {summary['completed']})")
    print(f"median THD  mpc {summary['median_thd_mpc']:.3f}%  "
          f"ann {summary['median_thd_ann']:.3f}%")
    print(f"ANN wins {summary['ann_wins']}/{summary['completed']}")
    if summary["stressed"]:
        print(f"stressed rows: {summary['stressed']}")

    if summary['rows'] and not summary['completed']:
        logger.error("=> every scenario failed")
        return 3
    return 0


if __name__ == '__main__':
    sys.exit(run_guarded(main))
