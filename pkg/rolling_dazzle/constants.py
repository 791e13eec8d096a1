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
Defines constants used by the dazzle simulation, the attack and the harness.
"""

# Exit codes of the dazzle_harness command
EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DOMAIN_ERROR = 2
EXIT_CLASSIFIER_SESSION = 3

# Luminous efficacy normalization (lm/W)
LUMINOUS_EFFICACY = 683.0

# mW/cm^2 -> W/m^2
MW_PER_CM2_IN_W_PER_M2 = 10.0

# Row mean (fraction of full scale) above which a row counts as dazzled
STRIPE_THRESHOLD = 0.9

# Pixel value above which a pattern entry counts as "on" when comparing patterns
PATTERN_BINARIZE_LEVEL = 0.5

# Significant digits for floating point values in emitted tables
TABLE_SIGNIFICANT_DIGITS = 9
THRESHOLD_TABLE_HEADER = ('theta_deg', 'l_b_cd_m2', 'duty_cycle')
SWEEP_TABLE_HEADER = (
    'axis', 'value', 'trials', 'successes', 'success_rate', 'eot_success_rate', 'mean_loss', 'max_loss', 'errors',
)
HISTOGRAM_TABLE_HEADER = ('label', 'name', 'count')

# Reference observer scene; the calibration anchors carry their own backgrounds.
REFERENCE_L_B = 10.0
REFERENCE_E_SENSOR = 500.0
REFERENCE_LAMBDA_NM = 650.0
REFERENCE_AGE_YEARS = 25.0
REFERENCE_PIGMENT = 1.0
REFERENCE_C_THR = 1.0

# (theta_deg, duty_cycle, l_b_cd_m2) anchors of the scattering calibration
CALIBRATION_ANCHORS = (
    (5.0, 0.0001, 0.1),
    (15.0, 0.0085, 1.0),
)

# Adam defaults
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# Initial value and jitter of the relaxed pulse vector
OMEGA_INIT = -2.0
OMEGA_JITTER = 0.1

SPARSITY_MODES = ('sum', 'mean')
SWEEP_AXES = ('duty_cycle', 'pulse_width', 'fov_fraction')
SHIFT_MODES = ('exhaustive', 'uniform')

BUNDLED_CLASSIFIER = 'bundled'
EXEC_CLASSIFIER_PREFIX = 'exec:'

MANIFEST_FILE_NAME = 'manifest.yaml'

# Default configuration. Keys mirror the manifest's `config` mapping.
DEFAULT_CONFIG = {
    # camera timing of the bundled 64x64 sensor, roughly 30 frames per second
    't_read_us': 460.0,
    't_exp_us': 1840.0,
    'n_rows_visible': 64,
    'n_rows_hidden': 4,
    'n_cols': 64,
    # pulse train
    'pulse_slots': [],
    'pulse_width_us': 15.0,
    't0_us': 0.0,
    'strength': 1.0,
    # saturation model (W/m^2, pixels)
    'i_sat_w_m2': 500.0,
    'k_spot_px': 1.0,
    'avg_dazzle_threshold_w_m2': 500.0,
    'peak_dazzle_threshold_w_m2': 1.0,
    'source_irradiance_w_m2': 500.0,
    # photopic scene
    'theta_deg': 5.0,
    'age_years': REFERENCE_AGE_YEARS,
    'pigment': REFERENCE_PIGMENT,
    'l_b_cd_m2': REFERENCE_L_B,
    'e_sensor_w_m2': REFERENCE_E_SENSOR,
    'lambda_nm': REFERENCE_LAMBDA_NM,
    'c_thr': REFERENCE_C_THR,
    's_coeff': None,
    't_exponent': None,
    'theta_grid': [5.0, 10.0, 15.0, 20.0, 30.0],
    'l_b_grid': [0.1, 1.0, 10.0, 100.0],
    'duty_cycle': 0.0001,
    # attack
    'alpha': 1.0,
    'learning_rate': 0.05,
    'iterations': 300,
    'eot_samples': 16,
    'binarize_threshold': 0.5,
    'sparsity_mode': 'sum',
    'max_pulses': 4,
    'failure_loss': 2.0,
    'shots': 2,
    # dataset and bundled classifier
    'dataset_classes': 10,
    'image_size': 64,
    'fov_fraction': 0.4,
    'train_size': 3000,
    'test_size': 200,
    'epochs': 8,
    'batch_size': 32,
    'training_learning_rate': 0.002,
    'min_accuracy': 0.95,
    # evaluation and sweeps
    'shift_mode': 'exhaustive',
    'shift_count': 254,
    'eval_images': 20,
    'sweep_axis': 'pulse_width',
    'sweep_grid': [15.33, 153.33, 460.0, 1073.33, 2300.0],
    'sweep_trials': 3,
    'reoptimize': True,
    'seed': 0,
    # inputs
    'classifier': BUNDLED_CLASSIFIER,
    'weights': None,
    'image': None,
    'label': None,
}
