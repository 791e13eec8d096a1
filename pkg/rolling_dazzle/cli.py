#
# MIT License
#
# (C) Copyright 2025-2026 The rolling-dazzle Authors
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#

"""
Command line entry point of the dazzle harness.

Global flags fall back to the DAZZLE_CONFIG, DAZZLE_SEED, DAZZLE_OUT,
DAZZLE_CLASSIFIER and DAZZLE_LOG_LEVEL environment variables. Exit codes:
0 success, 1 usage, 2 domain error, 3 classifier-session error.
"""

import argparse
import logging
import os

from rolling_dazzle import harness
from rolling_dazzle.classifier.external import ClassifierSessionError
from rolling_dazzle.config import ConfigError, load_config
from rolling_dazzle.constants import (
    EXIT_CLASSIFIER_SESSION,
    EXIT_DOMAIN_ERROR,
    EXIT_USAGE,
    SHIFT_MODES,
    SWEEP_AXES,
)
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.logging import configure_logging
from rolling_dazzle.photopic import mw_per_cm2_to_w_per_m2
from rolling_dazzle.sweep import cmd_sweep

LOGGER = logging.getLogger(__name__)

CONFIG_FILE = os.environ.get('DAZZLE_CONFIG', '').strip() or None
SEED = os.environ.get('DAZZLE_SEED', '').strip() or None
OUT_DIR = os.environ.get('DAZZLE_OUT', 'dazzle_out').strip()
CLASSIFIER = os.environ.get('DAZZLE_CLASSIFIER', '').strip() or None
LOG_LEVEL = os.environ.get('DAZZLE_LOG_LEVEL', 'INFO').strip()

COMMANDS = {
    'pattern': harness.cmd_pattern,
    'photopic': harness.cmd_photopic,
    'attack': harness.cmd_attack,
    'sweep': cmd_sweep,
    'evaluate': harness.cmd_evaluate,
    'train': harness.cmd_train,
    'calibrate-rn': harness.cmd_calibrate_rn,
}


class HarnessArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the usage exit code."""

    def error(self, message):
        self.print_usage()
        LOGGER.error('%s: %s', self.prog, message)
        raise SystemExit(EXIT_USAGE)


def int_list(value):
    """Parse a comma separated list of integers; the empty string is the empty list."""
    try:
        return [int(v) for v in value.split(',') if v.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f'expected comma separated integers, got {value!r}') from err


def float_list(value):
    """Parse a non-empty comma separated list of numbers."""
    try:
        values = [float(v) for v in value.split(',') if v.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f'expected comma separated numbers, got {value!r}') from err
    if not values:
        raise argparse.ArgumentTypeError('expected at least one number')
    return values


def classifier_spec(value):
    """Accept 'bundled' or 'exec:' followed by a peer command line."""
    if value != 'bundled' and not (value.startswith('exec:') and len(value) > len('exec:')):
        raise argparse.ArgumentTypeError(f"expected 'bundled' or 'exec:<command>', got {value!r}")
    return value


def _add_train_options(parser):
    parser.add_argument('--slots', type=int_list, help='active pulse slots, e.g. 0,5,9')
    parser.add_argument('--width-us', type=float, help='pulse width in microseconds')


def _add_classifier_options(parser):
    parser.add_argument('--weights', help='bundled classifier weights file')


def create_parser():
    """Return the argument parser of the dazzle_harness command."""
    parser = HarnessArgumentParser(prog='dazzle_harness', description='Rolling-shutter dazzle harness')
    parser.add_argument('--config', default=CONFIG_FILE, help='configuration file or run manifest')
    parser.add_argument('--seed', type=int, default=SEED, help='master seed')
    parser.add_argument('--out', default=OUT_DIR, help='output directory')
    parser.add_argument('--classifier', type=classifier_spec, default=CLASSIFIER,
                        help="'bundled' or 'exec:<command>'")
    parser.add_argument('--log-level', default=LOG_LEVEL,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), type=str.upper)
    subparsers = parser.add_subparsers(dest='command', metavar='command', parser_class=HarnessArgumentParser)
    subparsers.required = True

    pattern = subparsers.add_parser('pattern', help='render the dazzle pattern of a pulse train')
    _add_train_options(pattern)
    pattern.add_argument('--t0-us', type=float, help='start time of the train in microseconds')
    pattern.add_argument('--image', help='PGM/PPM image to dazzle')
    pattern.add_argument('--irradiance-mw-cm2', type=float, help='peak source irradiance at the sensor')

    photopic = subparsers.add_parser('photopic', help='tabulate imperceptible duty cycles')
    photopic.add_argument('--duty-cycle', type=float, help='duty cycle whose imperceptible angle is reported')

    attack = subparsers.add_parser('attack', help='optimize a pulse train against one image')
    attack.add_argument('--image', help='PGM/PPM image to attack')
    attack.add_argument('--label', type=int, help='true label of the image')
    attack.add_argument('--width-us', type=float, help='pulse width in microseconds')
    _add_classifier_options(attack)

    sweep = subparsers.add_parser('sweep', help='sweep attack success over one variable')
    sweep.add_argument('--axis', choices=SWEEP_AXES)
    sweep.add_argument('--grid', type=float_list, help='comma separated values of the swept variable')
    sweep.add_argument('--trials', type=int, help='trials per grid value')
    sweep.add_argument('--fixed-train', action='store_true',
                       help='evaluate the configured pulse train instead of re-optimizing per trial')
    _add_train_options(sweep)
    _add_classifier_options(sweep)

    evaluate = subparsers.add_parser('evaluate', help='classify held-out images under a fixed pulse train')
    _add_train_options(evaluate)
    evaluate.add_argument('--shift-mode', choices=SHIFT_MODES)
    evaluate.add_argument('--shift-count', type=int, help='shifts drawn in uniform mode')
    evaluate.add_argument('--fov-fraction', type=float, help='object size as a fraction of the field of view')
    _add_classifier_options(evaluate)

    train = subparsers.add_parser('train', help='train the bundled classifier')
    train.add_argument('--epochs', type=int)

    calibrate = subparsers.add_parser('calibrate-rn', help='measure R_n from a stripe image')
    calibrate.add_argument('--image', help='PGM/PPM image of a single-pulse stripe')
    return parser


def config_overrides(args):
    """Return the configuration keys set on the command line."""
    options = vars(args)
    overrides = {
        'seed': options.get('seed'),
        'classifier': options.get('classifier'),
        'pulse_slots': options.get('slots'),
        'pulse_width_us': options.get('width_us'),
        't0_us': options.get('t0_us'),
        'image': options.get('image'),
        'label': options.get('label'),
        'weights': options.get('weights'),
        'duty_cycle': options.get('duty_cycle'),
        'sweep_axis': options.get('axis'),
        'sweep_grid': options.get('grid'),
        'sweep_trials': options.get('trials'),
        'shift_mode': options.get('shift_mode'),
        'shift_count': options.get('shift_count'),
        'fov_fraction': options.get('fov_fraction'),
        'epochs': options.get('epochs'),
    }
    if options.get('irradiance_mw_cm2') is not None:
        overrides['source_irradiance_w_m2'] = mw_per_cm2_to_w_per_m2(options['irradiance_mw_cm2'])
    if options.get('fixed_train'):
        overrides['reoptimize'] = False
    if overrides['seed'] is not None:
        overrides['seed'] = int(overrides['seed'])
    return overrides


def main(argv=None):
    """Main function"""
    args = create_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = load_config(args.config, config_overrides(args))
        LOGGER.info('Running %s with seed %s into %s', args.command, config['seed'], args.out)
        manifest = COMMANDS[args.command](config, args.out)
    except ConfigError as err:
        LOGGER.error('%s', err)
        raise SystemExit(EXIT_USAGE) from err
    except ClassifierSessionError as err:
        LOGGER.error('Classifier session failed: %s', err)
        raise SystemExit(EXIT_CLASSIFIER_SESSION) from err
    except DazzleDomainError as err:
        LOGGER.error('%s', err)
        raise SystemExit(EXIT_DOMAIN_ERROR) from err
    except OSError as err:
        LOGGER.error('Unable to access %s: %s', err.filename or 'a file', err.strerror or err)
        raise SystemExit(EXIT_USAGE) from err
    LOGGER.info('%s finished; manifest written to %s', args.command, args.out)
    return manifest


if __name__ == '__main__':
    main()
