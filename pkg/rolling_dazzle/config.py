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
Loads harness configuration and builds the domain objects it describes.

A configuration is a flat mapping whose keys are listed in
schema/schema.yaml. Values come from the built-in defaults, then a config
file, then command-line overrides. A run manifest may be given instead of a
config file; its `config` mapping is used.
"""

import copy
import logging

from jsonschema.exceptions import ValidationError
import yaml

from rolling_dazzle.attack.optimizer import AttackConfig
from rolling_dazzle.camera_timing import CameraTimings, slot_count
from rolling_dazzle.classifier.dataset import SyntheticDataset
from rolling_dazzle.constants import DEFAULT_CONFIG
from rolling_dazzle.dazzle_synthesis import PulseTrain, SaturationModel
from rolling_dazzle.photopic import ConstantThreshold, calibrated_scene
from rolling_dazzle.schema.validate import validate

LOGGER = logging.getLogger(__name__)

MANIFEST_KEYS = ('tool_version', 'config')


class ConfigError(Exception):
    """A configuration file or value is unreadable or fails validation."""


def _validate(data, source):
    try:
        validate(data)
    except ValidationError as err:
        key = '.'.join(str(part) for part in err.absolute_path) or '(top level)'
        raise ConfigError(f'Invalid configuration key {key} in {source}: {err.message}') from err


def read_config_file(path):
    """Return the validated configuration mapping stored in a file.

    Raises:
        ConfigError: if the file cannot be read, is not a mapping, or holds
            unknown keys or invalid values.
    """
    try:
        with open(path, encoding='utf-8') as config_file:
            data = yaml.safe_load(config_file)
    except (OSError, yaml.YAMLError) as err:
        raise ConfigError(f'Unable to read configuration file {path}: {err}') from err
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'Configuration file {path} must hold a mapping, got {type(data).__name__}')
    if all(key in data for key in MANIFEST_KEYS):
        LOGGER.info('Reading configuration from run manifest %s', path)
        data = data['config'] or {}
    _validate(data, path)
    return data


def load_config(path=None, overrides=None):
    """Return the full configuration: defaults, then the file at `path`, then `overrides`."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        config.update(read_config_file(path))
    if overrides:
        config.update({key: value for key, value in overrides.items() if value is not None})
    _validate(config, 'the merged configuration')
    return config


def timings_from_config(config):
    """Return the CameraTimings of a configuration."""
    return CameraTimings(
        t_read_us=config['t_read_us'],
        t_exp_us=config['t_exp_us'],
        n_rows_visible=config['n_rows_visible'],
        n_rows_hidden=config['n_rows_hidden'],
        n_cols=config['n_cols'],
    )


def pulse_train_from_config(config, timings, width_us=None):
    """Return the configured pulse train, optionally with another pulse width."""
    width_us = config['pulse_width_us'] if width_us is None else width_us
    return PulseTrain.from_slots(config['pulse_slots'], slot_count(timings), width_us)


def saturation_from_config(config):
    return SaturationModel(
        i_sat=config['i_sat_w_m2'],
        k_spot=config['k_spot_px'],
        avg_dazzle_threshold=config['avg_dazzle_threshold_w_m2'],
        peak_dazzle_threshold=config['peak_dazzle_threshold_w_m2'],
    )


def scene_from_config(config):
    """Return the photopic scene of a configuration.

    S and T come from the built-in calibration unless the configuration sets them.
    """
    overrides = {key: config[key] for key in ('s_coeff', 't_exponent') if config.get(key) is not None}
    return calibrated_scene(
        theta_deg=config['theta_deg'],
        age_years=config['age_years'],
        pigment=config['pigment'],
        l_b=config['l_b_cd_m2'],
        e_sensor=config['e_sensor_w_m2'],
        lambda_nm=config['lambda_nm'],
        c_thr=ConstantThreshold(config['c_thr']),
        **overrides,
    )


def attack_config_from_config(config, **overrides):
    """Return the AttackConfig of a configuration; keyword arguments replace fields."""
    values = {
        'alpha': config['alpha'],
        'learning_rate': config['learning_rate'],
        'iterations': config['iterations'],
        'eot_samples': config['eot_samples'],
        'binarize_threshold': config['binarize_threshold'],
        'seed': config['seed'],
        'sparsity_mode': config['sparsity_mode'],
        'max_pulses': config['max_pulses'],
        'failure_loss': config['failure_loss'],
        'pulse_width_us': config['pulse_width_us'],
        'strength': config['strength'],
    }
    values.update(overrides)
    return AttackConfig(**values)


def dataset_from_config(config, **overrides):
    """Return the SyntheticDataset of a configuration; keyword arguments replace fields."""
    values = {
        'seed': config['seed'],
        'num_classes': config['dataset_classes'],
        'image_size': config['image_size'],
        'fov_fraction': config['fov_fraction'],
        'train_size': config['train_size'],
        'test_size': config['test_size'],
    }
    values.update(overrides)
    return SyntheticDataset(**values)
