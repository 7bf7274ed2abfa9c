# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Argument plumbing shared by the entry scripts."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import _init_paths  # noqa: F401
from core.config import config
from core.config import restore_defaults
from core.config import update_config
from utils.utils import ArgumentParser


def make_parser(description, argv):
    """Parser with `--cfg` applied before the remaining options are declared,
    so option defaults can come from the experiment file."""
    restore_defaults()
    parser = ArgumentParser(description=description)
    parser.add_argument('--cfg',
                        help='experiment configure file name',
                        default='',
                        type=str)
    args, _ = parser.parse_known_args(argv)
    if args.cfg:
        update_config(args.cfg)
    return parser


def add_sim_args(parser):
    parser.add_argument('--substeps',
                        help='RK4 substeps per sampling period',
                        default=config.SIM.SUBSTEPS,
                        type=int)
    parser.add_argument('--reference-advance',
                        help='compare the prediction with the reference at k+1',
                        action='store_true')
    parser.add_argument('--cycles',
                        help='fundamental cycles for scenarios that do not set them',
                        default=config.SIM.DEFAULT_CYCLES,
                        type=float)


def add_scenario_args(parser, required=True):
    parser.add_argument('--scenarios',
                        help='scenario YAML file',
                        required=required,
                        type=str)
    parser.add_argument('--workers',
                        help='parallel scenario workers',
                        default=config.WORKERS,
                        type=int)

