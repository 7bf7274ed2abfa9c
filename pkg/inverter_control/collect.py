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
from core.config import config
from core.config import load_scenarios
from core.config import reset_config
from core.simulate import sim_options
from dataset.expert import collect
from dataset.expert import write_dataset
from utils.utils import create_logger
from utils.utils import run_guarded
from utils.utils import write_manifest


def parse_args(argv=None):
    parser = make_parser('Collect MPC expert demonstrations', argv)
    add_scenario_args(parser)
    add_sim_args(parser)
    parser.add_argument('--output',
                        help='dataset CSV to write',
                        required=True,
                        type=str)
    parser.add_argument('--seed',
                        help='recorded in the manifest',
                        default=config.SEED,
                        type=int)
    parser.add_argument('--keep-going',
                        help='skip diverging scenarios instead of aborting',
                        action='store_true')
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    reset_config(config, args)

    output_dir = os.path.dirname(os.path.abspath(args.output))
    os.makedirs(output_dir, exist_ok=True)
    logger, _ = create_logger(config, args.cfg or 'default', output_dir, 'collect')

    scenarios = load_scenarios(args.scenarios, default_cycles=args.cycles)
    if not scenarios:
        logger.warning(f"=> {args.scenarios} holds no scenarios, writing an empty dataset")

    frame, failed = collect(
        scenarios,
        workers=config.WORKERS,
        keep_going=args.keep_going,
        **sim_options(config),
    )
    write_dataset(frame, args.output)

    rows = frame.groupby("scenario_id", sort=False).size() if len(frame) else {}
    write_manifest(
        args.output + '.manifest.json',
        command='collect',
        inputs={'scenarios': args.scenarios},
        outputs={'dataset': args.output},
        seed=config.SEED,
        substeps=config.SIM.SUBSTEPS,
        reference_advance=config.SIM.REFERENCE_ADVANCE,
        rows=int(len(frame)),
        rows_per_scenario={str(k): int(v) for k, v in dict(rows).items()},
        failed=failed,
        scenarios=[s.to_dict() for s in scenarios],
    )
    logger.info(f"=> wrote {len(frame)} rows to {args.output}")
    return 0


if __name__ == '__main__':
    sys.exit(run_guarded(main))
