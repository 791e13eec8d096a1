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
Harness commands: pattern rendering, photopic tables, attacks, evaluation,
training and R_n calibration. Every command writes its outputs and a run
manifest into an output directory and returns the manifest.
"""

import collections
import contextlib
import logging
import os

import numpy as np

from rolling_dazzle.attack.optimizer import eot_losses, optimize
from rolling_dazzle.camera_timing import (
    calibrate_rn,
    frame_duration,
    frame_rate_hz,
    rows_exposure_constant,
    slot_count,
)
from rolling_dazzle.classifier.dataset import render_dataset
from rolling_dazzle.classifier.external import ClassifierSessionError, ExternalClassifierSession
from rolling_dazzle.classifier.model import load_weights, predict, save_weights
from rolling_dazzle.classifier.training import TrainingError, accuracy, train_bundled
from rolling_dazzle.config import (
    ConfigError,
    attack_config_from_config,
    dataset_from_config,
    pulse_train_from_config,
    saturation_from_config,
    scene_from_config,
    timings_from_config,
)
from rolling_dazzle.constants import (
    EXEC_CLASSIFIER_PREFIX,
    HISTOGRAM_TABLE_HEADER,
    THRESHOLD_TABLE_HEADER,
)
from rolling_dazzle.dazzle_synthesis import (
    compose,
    dazzle_condition,
    pattern_from_rows,
    rows_for_train,
    saturated_spot_diameter,
    shift_pattern,
    train_pattern,
)
from rolling_dazzle.manifest import RunManifest
from rolling_dazzle.photopic import (
    PhotopicDomainError,
    duty_cycle_of_train,
    duty_cycle_threshold,
    imperceptible_angle,
    threshold_surface,
)
from rolling_dazzle.util import make_generator, read_pnm, write_pnm, write_table

LOGGER = logging.getLogger(__name__)

PATTERN_FILE = 'pattern.pgm'
ATTACKED_FILE = 'attacked.ppm'
SHOT_FILE = 'attacked_shot{}.ppm'
THRESHOLD_FILE = 'thresholds.csv'
EVALUATION_FILE = 'evaluation.csv'
WEIGHTS_FILE = 'classifier_weights.zip'


def output_path(out_dir, name):
    """Return the path of output `name`, creating out_dir if needed."""
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def run_seeds(config):
    """Return the seeds recorded in a run manifest."""
    return {'seed': int(config['seed'])}


def open_classifier(config):
    """Return a context manager yielding the classifier a configuration names.

    'exec:<command>' starts an external peer. Otherwise the bundled classifier
    is loaded from `weights`, or trained from the configured dataset when no
    weights file is given.
    """
    spec = config['classifier']
    if spec.startswith(EXEC_CLASSIFIER_PREFIX):
        return ExternalClassifierSession(spec[len(EXEC_CLASSIFIER_PREFIX):])
    if config['weights']:
        return contextlib.nullcontext(load_weights(config['weights']))
    LOGGER.warning('No weights file given; training the bundled classifier (seed %s)', config['seed'])
    model = train_bundled(
        dataset_from_config(config), config['seed'], config['epochs'],
        batch_size=config['batch_size'], learning_rate=config['training_learning_rate'],
        min_accuracy=None,
    )
    return contextlib.nullcontext(model)


def fit_image(x, timings, input_shape=None):
    """Return an H x W x C image matching the sensor and, if known, the classifier input."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[:, :, np.newaxis]
    if input_shape is not None and x.shape[2] == 1 and input_shape[2] == 3:
        x = np.repeat(x, 3, axis=2)
    if x.shape[:2] != (timings.n_rows_visible, timings.n_cols):
        raise ConfigError(
            f'Image of shape {x.shape[:2]} does not match n_rows_visible x n_cols = '
            f'{timings.n_rows_visible} x {timings.n_cols}'
        )
    return x


def _require(config, key):
    if config.get(key) is None:
        raise ConfigError(f'Configuration key {key} is required by this command')
    return config[key]


def cmd_pattern(config, out_dir):
    """Write the dazzle pattern of the configured pulse train, and the attacked image if one is given."""
    timings = timings_from_config(config)
    train = pulse_train_from_config(config, timings)
    rows = shift_pattern(rows_for_train(train, timings), config['t0_us'], timings.t_read_us)
    pattern = pattern_from_rows(rows, timings.n_cols, timings.n_rows_visible)

    outputs = [output_path(out_dir, PATTERN_FILE)]
    write_pnm(outputs[0], pattern.delta)
    inputs = []
    if config['image']:
        inputs.append(config['image'])
        image = read_pnm(config['image'])
        attacked = compose(image, pattern, config['strength'])
        name = ATTACKED_FILE if image.ndim == 3 else 'attacked.pgm'
        outputs.append(output_path(out_dir, name))
        write_pnm(outputs[-1], attacked)

    model = saturation_from_config(config)
    irradiance = config['source_irradiance_w_m2']
    dazzles = dazzle_condition(irradiance, train.width_us, timings, model)
    if train.pulse_count and not dazzles:
        LOGGER.warning('A source of %s W/m^2 with %s us pulses is too weak to dazzle the sensor',
                       irradiance, train.width_us)
    results = {
        'n_slots': slot_count(timings),
        'rows_exposure_constant': rows_exposure_constant(timings),
        'frame_duration_us': float(frame_duration(timings)),
        'pulse_slots': train.slots,
        'width_us': float(train.width_us),
        'dazzled_rows': int(np.count_nonzero(pattern.rows)),
        'duty_cycle': duty_cycle_of_train(train.pulse_count, train.width_us, frame_rate_hz(timings)),
        'dazzles': dazzles,
        'spot_diameter_px': saturated_spot_diameter(irradiance, model),
    }
    LOGGER.info('Pattern has %s dazzled rows from %s pulses', results['dazzled_rows'], train.pulse_count)
    manifest = RunManifest('pattern', config, run_seeds(config), inputs, outputs, results)
    manifest.write(out_dir)
    return manifest


def cmd_photopic(config, out_dir):
    """Write the duty-cycle threshold table over the configured angle and background grids."""
    scene = scene_from_config(config)
    rows = threshold_surface(config['theta_grid'], config['l_b_grid'], scene)
    path = output_path(out_dir, THRESHOLD_FILE)
    write_table(path, THRESHOLD_TABLE_HEADER, [tuple(float(v) for v in row) for row in rows])

    try:
        angle = imperceptible_angle(config['duty_cycle'], scene)
    except PhotopicDomainError as err:
        LOGGER.warning('%s', err)
        angle = None
    results = {
        's_coeff': float(scene.s_coeff),
        't_exponent': float(scene.t_exponent),
        'duty_cycle_threshold': float(duty_cycle_threshold(scene)),
        'duty_cycle': float(config['duty_cycle']),
        'imperceptible_angle_deg': angle,
    }
    manifest = RunManifest('photopic', config, run_seeds(config), [], [path], results)
    manifest.write(out_dir)
    return manifest


def _shot_shifts(config, n_slots):
    rng = make_generator(config['seed'], 'attack-shots')
    count = min(config['shots'], n_slots)
    return [int(s) for s in rng.choice(n_slots, size=count, replace=False)]


def cmd_attack(config, out_dir, classifier=None):
    """Optimize a pulse train against one image and render it at distinct random shifts."""
    image_path = _require(config, 'image')
    label = int(_require(config, 'label'))
    timings = timings_from_config(config)
    with contextlib.ExitStack() as stack:
        if classifier is None:
            classifier = stack.enter_context(open_classifier(config))
        x = fit_image(read_pnm(image_path), timings, classifier.input_shape)

        clean_label, clean_probabilities = predict(classifier, x)
        LOGGER.info('Clean image classified as %s with confidence %.4f',
                    classifier.label_name(clean_label), clean_probabilities[clean_label])
        result = optimize(x, label, classifier, timings, attack_config_from_config(config))

        outputs = [output_path(out_dir, PATTERN_FILE)]
        write_pnm(outputs[0], train_pattern(result.train, timings).delta)
        shots = []
        for index, shift in enumerate(_shot_shifts(config, result.train.n_slots)):
            attacked = compose(x, train_pattern(result.train.rolled(shift), timings), config['strength'])
            predicted, probabilities = predict(classifier, attacked)
            outputs.append(output_path(out_dir, SHOT_FILE.format(index)))
            write_pnm(outputs[-1], attacked)
            shots.append({
                'shift': shift,
                'predicted': predicted,
                'predicted_name': classifier.label_name(predicted),
                'true_label_confidence': float(probabilities[label]),
            })
            LOGGER.info('Shot %s at shift %s classified as %s', index, shift, classifier.label_name(predicted))

    results = {
        'label': label,
        'clean': {
            'predicted': clean_label,
            'true_label_confidence': float(clean_probabilities[label]),
        },
        'attack': result.as_dict(),
        'shots': shots,
    }
    manifest = RunManifest('attack', config, run_seeds(config), [image_path], outputs, results)
    manifest.write(out_dir)
    return manifest


def evaluation_shifts(config, n_slots):
    """Return the slot shifts an evaluation visits."""
    if config['shift_mode'] == 'exhaustive':
        return list(range(n_slots))
    rng = make_generator(config['seed'], 'evaluate-shifts')
    return [int(s) for s in rng.integers(0, n_slots, size=config['shift_count'])]


def evaluation_images(config, **dataset_overrides):
    """Return the held-out images and labels an evaluation uses."""
    images, labels = render_dataset(dataset_from_config(config, **dataset_overrides), 'test')
    count = min(config['eval_images'], len(labels))
    if count < config['eval_images']:
        LOGGER.warning('Only %s held-out images are available for evaluation', count)
    return images[:count], labels[:count]


def cmd_evaluate(config, out_dir, classifier=None):
    """Classify every (held-out image, shift) pair under the configured pulse train."""
    timings = timings_from_config(config)
    train = pulse_train_from_config(config, timings)
    shifts = evaluation_shifts(config, train.n_slots)
    images, labels = evaluation_images(config)

    histogram = collections.Counter()
    trials = successes = 0
    clean_errors = 0
    partial = True
    with contextlib.ExitStack() as stack:
        if classifier is None:
            classifier = stack.enter_context(open_classifier(config))
        try:
            for image, label in zip(images, labels):
                x = fit_image(image, timings, classifier.input_shape)
                clean_label, _ = predict(classifier, x)
                clean_errors += int(clean_label != label)
                _, predicted = eot_losses(train, x, int(label), classifier, timings, shifts, config['strength'])
                histogram.update(int(p) for p in predicted)
                trials += len(predicted)
                successes += int(np.sum(predicted != label))
            partial = False
        except ClassifierSessionError:
            LOGGER.error('Classifier failed after %s trials; writing partial results', trials)
            raise
        finally:
            path = output_path(out_dir, EVALUATION_FILE)
            write_table(path, HISTOGRAM_TABLE_HEADER, [
                (label, classifier.label_name(label), histogram[label])
                for label in range(classifier.num_classes)
            ])
            results = {
                'pulse_slots': train.slots,
                'width_us': float(train.width_us),
                'duty_cycle': duty_cycle_of_train(train.pulse_count, train.width_us, frame_rate_hz(timings)),
                'shift_mode': config['shift_mode'],
                'shifts': len(shifts),
                'images': len(labels),
                'trials': trials,
                'successes': successes,
                'success_rate': successes / trials if trials else 0.0,
                'clean_error_rate': clean_errors / len(labels) if len(labels) else 0.0,
                'partial': partial,
            }
            manifest = RunManifest('evaluate', config, run_seeds(config), [], [path], results)
            manifest.write(out_dir)
    LOGGER.info('Success rate %.4f over %s trials', results['success_rate'], trials)
    return manifest


def cmd_train(config, out_dir):
    """Train the bundled classifier and write its weights."""
    dataset = dataset_from_config(config)
    model = train_bundled(
        dataset, config['seed'], config['epochs'], batch_size=config['batch_size'],
        learning_rate=config['training_learning_rate'], min_accuracy=None,
    )
    path = output_path(out_dir, WEIGHTS_FILE)
    save_weights(model, path)
    test_images, test_labels = render_dataset(dataset, 'test')
    held_out = accuracy(model, test_images, test_labels)
    results = {
        'held_out_accuracy': float(held_out),
        'held_out_images': int(len(test_labels)),
        'min_accuracy': float(config['min_accuracy']),
        'passed': bool(held_out >= config['min_accuracy']),
    }
    manifest = RunManifest('train', config, run_seeds(config), [], [path], results)
    manifest.write(out_dir)
    if config['epochs'] and not results['passed']:
        raise TrainingError(
            f'Held-out accuracy {held_out:.4f} is below the required {config["min_accuracy"]:.4f}'
        )
    return manifest


def cmd_calibrate_rn(config, out_dir):
    """Measure R_n from a stripe image and compare it with the configured timings."""
    image_path = _require(config, 'image')
    measured = calibrate_rn(read_pnm(image_path))
    expected = rows_exposure_constant(timings_from_config(config))
    if measured != expected:
        LOGGER.warning('Measured R_n %s differs from the configured timings (%s)', measured, expected)
    results = {'rows_exposure_constant': measured, 'configured': expected, 'matches': measured == expected}
    LOGGER.info('Measured rows exposure constant %s', measured)
    manifest = RunManifest('calibrate-rn', config, run_seeds(config), [image_path], [], results)
    manifest.write(out_dir)
    return manifest
