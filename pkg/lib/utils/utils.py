# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import argparse
import hashlib
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import json_tricks


def create_logger(cfg, cfg_name, final_output_dir, phase='train', make_dir=True):
    time_str = time.strftime('%Y-%m-%d-%H-%M')
    cfg_name = os.path.basename(cfg_name).split('.')[0]
    log_file = '{}_{}_{}.log'.format(cfg_name, time_str, phase)
    final_log_file = os.path.join(final_output_dir, log_file)
    head = '%(asctime)-15s %(message)s'

    logger = logging.getLogger()
    logger.setLevel(logging.INFO)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    if make_dir:
        file_handler = logging.FileHandler(final_log_file)
        file_handler.setFormatter(logging.Formatter(head))
        logger.addHandler(file_handler)
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter(head))
    logger.addHandler(console)

    tensorboard_log_dir = Path(cfg.LOG_DIR) / cfg_name / \
        (phase + "_" + time_str)

    return logger, str(tensorboard_log_dir)


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def dump_json(obj, path):
    """Stable JSON (sorted keys, numpy converted to plain lists)."""
    with open(path, 'w') as f:
        f.write(json_tricks.dumps(obj, primitives=True, indent=2, sort_keys=True))
        f.write('\n')


def load_json(path):
    with open(path) as f:
        return json_tricks.loads(f.read())


def write_manifest(path, command, inputs, outputs, **extra):
    """Provenance record: sha256 of every input and output file."""
    manifest = dict(
        command=command,
        inputs={name: dict(path=str(p), sha256=sha256_file(p))
                for name, p in sorted(inputs.items())},
        outputs={name: dict(path=os.path.basename(str(p)), sha256=sha256_file(p))
                 for name, p in sorted(outputs.items())},
    )
    manifest.update(extra)
    dump_json(manifest, path)
    return manifest


def map_ordered(fn, items, workers=1):
    """`map` over independent jobs; results come back in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors on exit code 1 (2 is an input error here)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def run_guarded(main, argv=None):
    """Run an entry point and map failures onto exit codes:
    0 success, 1 usage (argparse), 2 bad input, 3 numerical failure."""
    from core.errors import NumericalError

    log = logging.getLogger(__name__)
    try:
        return main(argv) or 0
    except NumericalError as e:
        log.error(f"=> numerical failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError) as e:
        log.error(f"=> input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
