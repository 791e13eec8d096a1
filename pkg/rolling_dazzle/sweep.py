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
Sweeps of attack success over duty cycle, pulse width or object size.

Every grid value is a cell; every cell runs `sweep_trials` seeded trials, trial
t attacking held-out image t (cyclically) with attack seed seed + t.
"""

import contextlib
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.stats import spearmanr

from rolling_dazzle.attack.optimizer import eot_losses, optimize
from rolling_dazzle.camera_timing import frame_rate_hz
from rolling_dazzle.classifier.external import ClassifierSessionError
from rolling_dazzle.config import attack_config_from_config, pulse_train_from_config, timings_from_config
from rolling_dazzle.constants import SWEEP_AXES, SWEEP_TABLE_HEADER
from rolling_dazzle.dazzle_synthesis import PulseTrain
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.harness import evaluation_images, fit_image, open_classifier, output_path, run_seeds
from rolling_dazzle.manifest import RunManifest
from rolling_dazzle.util import write_table

LOGGER = logging.getLogger(__name__)

SWEEP_FILE = 'sweep.csv'


class SweepError(DazzleDomainError):
    """A sweep was configured with an unknown axis or an empty grid."""


@dataclass
class SweepRecord:
    """Outcome of one sweep cell.

    Attributes:
        axis (str): the swept variable.
        value (float): its value in this cell.
        successes (list of bool): attack success of every completed trial.
        eot_rates (list of float): fraction of misclassified shifts per trial.
        losses (list of float): mean EoT loss per trial.
        errors (int): trials that failed with a domain error or a classifier session error.
    """
    axis: str
    value: float
    successes: list = field(default_factory=list)
    eot_rates: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    errors: int = 0

    @property
    def trials(self):
        """int: completed trials."""
        return len(self.successes)

    @property
    def success_rate(self):
        """float: successes / trials."""
        return sum(self.successes) / self.trials if self.trials else 0.0

    @property
    def eot_success_rate(self):
        """float: mean fraction of misclassified shifts over the completed trials."""
        return float(np.mean(self.eot_rates)) if self.eot_rates else 0.0

    @property
    def mean_loss(self):
        return float(np.mean(self.losses)) if self.losses else 0.0

    @property
    def max_loss(self):
        return float(np.max(self.losses)) if self.losses else 0.0

    def as_row(self):
        return (self.axis, float(self.value), self.trials, sum(self.successes), float(self.success_rate),
                self.eot_success_rate, self.mean_loss, self.max_loss, self.errors)


def pulse_budget(duty_cycle, width_us, frame_rate):
    """Return the largest pulse count within a duty cycle, at least one."""
    if width_us <= 0 or frame_rate <= 0:
        raise SweepError('Pulse width and frame rate must be positive to budget a duty cycle')
    return max(1, int(math.floor(duty_cycle / (width_us * 1e-6 * frame_rate) + 1e-9)))


def _cell_settings(config, axis, value, timings):
    """Return (pulse width, pulse budget, dataset overrides) of one cell."""
    width = float(config['pulse_width_us'])
    budget = config['max_pulses']
    dataset_overrides = {}
    if axis == 'pulse_width':
        width = float(value)
    elif axis == 'duty_cycle':
        budget = pulse_budget(value, width, frame_rate_hz(timings))
    else:
        dataset_overrides['fov_fraction'] = float(value)
    return width, budget, dataset_overrides


def _fixed_train(config, timings, width, budget):
    train = pulse_train_from_config(config, timings, width)
    if budget is not None and train.pulse_count > budget:
        return PulseTrain.from_slots(train.slots[:budget], train.n_slots, width)
    return train


def run_cell(config, axis, value, classifier, timings):
    """Run every trial of one sweep cell and return its SweepRecord."""
    width, budget, dataset_overrides = _cell_settings(config, axis, value, timings)
    images, labels = evaluation_images(config, **dataset_overrides)
    record = SweepRecord(axis, float(value))
    for trial in range(config['sweep_trials']):
        x = fit_image(images[trial % len(labels)], timings, classifier.input_shape)
        label = int(labels[trial % len(labels)])
        try:
            if config['reoptimize']:
                attack_config = attack_config_from_config(
                    config, seed=config['seed'] + trial, pulse_width_us=width, max_pulses=budget,
                )
                result = optimize(x, label, classifier, timings, attack_config)
                success, eot_rate, loss = result.success, result.success_rate, result.loss
            else:
                train = _fixed_train(config, timings, width, budget)
                losses, predicted = eot_losses(train, x, label, classifier, timings, strength=config['strength'])
                eot_rate = float(np.mean(predicted != label))
                success, loss = bool(train.pulse_count and eot_rate >= 0.5), float(np.mean(losses))
        except (DazzleDomainError, ClassifierSessionError) as err:
            LOGGER.warning('Sweep cell %s=%s trial %s failed: %s', axis, value, trial, err)
            record.errors += 1
            continue
        record.successes.append(bool(success))
        record.eot_rates.append(float(eot_rate))
        record.losses.append(float(loss))
    LOGGER.info('Sweep cell %s=%s: success rate %.3f, max loss %.4f',
                axis, value, record.success_rate, record.max_loss)
    return record


def rank_correlation(values, measured):
    """Return Spearman's rho of measured against values, or None when undefined."""
    if len(values) < 2:
        return None
    rho, _ = spearmanr(values, measured)
    return None if np.isnan(rho) else float(rho)


def cmd_sweep(config, out_dir, classifier=None):
    """Sweep the configured axis over its grid and write the table and manifest."""
    axis = config['sweep_axis']
    if axis not in SWEEP_AXES:
        raise SweepError(f'Unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}')
    grid = sorted(float(v) for v in config['sweep_grid'])
    if not grid:
        raise SweepError('The sweep grid must not be empty')
    timings = timings_from_config(config)

    with contextlib.ExitStack() as stack:
        if classifier is None:
            classifier = stack.enter_context(open_classifier(config))
        records = [run_cell(config, axis, value, classifier, timings) for value in grid]

    path = output_path(out_dir, SWEEP_FILE)
    write_table(path, SWEEP_TABLE_HEADER, [record.as_row() for record in records])
    results = {
        'axis': axis,
        'cells': [
            {'value': record.value, 'success_rate': record.success_rate,
             'eot_success_rate': record.eot_success_rate, 'max_loss': record.max_loss,
             'errors': record.errors}
            for record in records
        ],
        'spearman_success_rate': rank_correlation(grid, [r.eot_success_rate for r in records]),
        'spearman_max_loss': rank_correlation(grid, [r.max_loss for r in records]),
    }
    manifest = RunManifest('sweep', config, run_seeds(config), [], [path], results)
    manifest.write(out_dir)
    return manifest
