# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Single entry point: python inverter_control/main.py <subcommand> [options]

Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical failure.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys

import _init_paths  # noqa: F401
import collect
import compare
import simulate
import thd
import train
from utils.utils import run_guarded


COMMANDS = {
    'collect': collect.main,
    'train': train.main,
    'simulate': simulate.main,
    'compare': compare.main,
    'thd': thd.main,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in COMMANDS:
        print(f"usage: main.py {{{','.join(COMMANDS)}}} [options]", file=sys.stderr)
        return 1
    return run_guarded(COMMANDS[argv[0]], argv[1:])


if __name__ == '__main__':
    sys.exit(main())
