# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import pprint
import sys

from torch.utils.tensorboard import SummaryWriter

import _init_paths  # noqa: F401
from common import make_parser
from core.config import config
from core.config import get_model_name
from core.config import reset_config
from core.function import TrainConfig
from core.function import train_scg
from dataset.expert import ExpertDataset
from dataset.expert import read_dataset
from models.mlp import get_model
from models.mlp import save_model
from utils.utils import create_logger
from utils.utils import dump_json
from utils.utils import run_guarded
from utils.utils import write_manifest


def parse_args(argv=None):
    parser = make_parser('Train the student network with SCG', argv)
    parser.add_argument('--dataset',
                        help='dataset CSV written by collect',
                        required=True,
                        type=str)
    parser.add_argument('--output',
                        help='model file to write',
                        required=True,
                        type=str)
    parser.add_argument('--max-epochs',
                        help='epoch cap',
                        default=config.TRAIN.MAX_EPOCHS,
                        type=int)
    parser.add_argument('--patience',
                        help='epochs without validation improvement before stopping',
                        default=config.TRAIN.PATIENCE,
                        type=int)
    parser.add_argument('--seed',
                        help='split and initialization seed',
                        default=config.SEED,
                        type=int)
    parser.add_argument('--activation',
                        help='hidden activation',
                        choices=['tanh', 'logistic'],
                        type=str)
    parser.add_argument('--delayed-features',
                        help='append the previous step features (16 inputs)',
                        action='store_true')
    parser.add_argument('--log-dir',
                        help='tensorboard root',
                        type=str)
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    reset_config(config, args)
    config.TRAIN.MAX_EPOCHS = args.max_epochs
    config.TRAIN.PATIENCE = args.patience
    if args.log_dir:
        config.LOG_DIR = args.log_dir

    output_dir = os.path.dirname(os.path.abspath(args.output))
    os.makedirs(output_dir, exist_ok=True)
    logger, tb_log_dir = create_logger(
        config, args.cfg or 'default', output_dir, 'train')
    logger.info(pprint.pformat(args))

    frame = read_dataset(args.dataset, config.MODEL.NUM_CLASSES)
    data = ExpertDataset(frame, delayed=config.MODEL.DELAYED_FEATURES)
    logger.info(f"=> {len(data)} rows, class histogram {data.class_histogram().tolist()}")

    _, full_name = get_model_name(config)
    model = get_model(config)
    writer = SummaryWriter(log_dir=tb_log_dir)
    try:
        model, report = train_scg(
            data.features, data.targets, TrainConfig.from_config(config),
            model=model, writer=writer)
    finally:
        writer.close()

    save_model(model, args.output)
    report_file = os.path.splitext(args.output)[0] + '.report.json'
    dump_json(dict(model=full_name, **report.to_dict()), report_file)
    write_manifest(
        args.output + '.manifest.json',
        command='train',
        inputs={'dataset': args.dataset},
        outputs={'model': args.output, 'report': report_file},
        seed=config.SEED,
        config=dict(MODEL=dict(config.MODEL), TRAIN=dict(config.TRAIN)),
    )
    logger.info(
        f"=> {full_name}: {report.epochs} epochs, best {report.best_epoch}, "
        f"test acc {report.test_acc:.3f}")
    return 0


if __name__ == '__main__':
    sys.exit(run_guarded(main))
