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
Human visibility of the attacking source: glare scattering of the eye,
source luminance and contrast, and the largest duty cycle at which the source
stays below the observer's contrast threshold.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
import logging
import math

import numpy as np
from scipy.optimize import brentq

from rolling_dazzle.constants import (
    CALIBRATION_ANCHORS,
    LUMINOUS_EFFICACY,
    MW_PER_CM2_IN_W_PER_M2,
    REFERENCE_AGE_YEARS,
    REFERENCE_C_THR,
    REFERENCE_E_SENSOR,
    REFERENCE_L_B,
    REFERENCE_LAMBDA_NM,
    REFERENCE_PIGMENT,
)
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.photopic_tables import (
    PHOTOPIC_EFFICIENCY,
    PHOTOPIC_END_NM,
    PHOTOPIC_START_NM,
    PHOTOPIC_STEP_NM,
)

LOGGER = logging.getLogger(__name__)

MIN_VIEWING_ANGLE_DEG = 0.5
MAX_VIEWING_ANGLE_DEG = 90.0

_WAVELENGTHS = np.arange(PHOTOPIC_START_NM, PHOTOPIC_END_NM + 1, PHOTOPIC_STEP_NM, dtype=float)
_EFFICIENCY = np.asarray(PHOTOPIC_EFFICIENCY, dtype=float)


class PhotopicDomainError(DazzleDomainError):
    """A photometric quantity was requested outside its domain."""


class ConstantThreshold:
    """A threshold-contrast model that ignores the background luminance."""

    def __init__(self, value=REFERENCE_C_THR):
        self.value = float(value)

    def __call__(self, l_b):
        return self.value

    def __eq__(self, other):
        return isinstance(other, ConstantThreshold) and other.value == self.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f'ConstantThreshold({self.value})'


@dataclass(frozen=True)
class PhotopicScene:
    """Observer and background parameters of the visibility model.

    Attributes:
        theta_deg (float): off-axis viewing angle in degrees.
        age_years (float): observer age.
        pigment (float): eye pigment factor.
        l_b (float): background luminance, cd/m^2.
        e_sensor (float): irradiance at the aperture while the source is on, W/m^2.
        lambda_nm (float): source wavelength.
        s_coeff (float): scattering scale S.
        t_exponent (float): luminance exponent T.
        c_thr (callable): threshold contrast as a function of l_b.
    """
    theta_deg: float
    age_years: float
    pigment: float
    l_b: float
    e_sensor: float
    lambda_nm: float
    s_coeff: float
    t_exponent: float
    c_thr: object = field(default_factory=ConstantThreshold)

    def __post_init__(self):
        if not self.theta_deg > 0:
            raise PhotopicDomainError(f'Viewing angle must be positive, got {self.theta_deg}')
        if not self.l_b > 0:
            raise PhotopicDomainError(f'Background luminance must be positive, got {self.l_b}')
        if not self.e_sensor > 0:
            raise PhotopicDomainError(f'Sensor irradiance must be positive, got {self.e_sensor}')
        if self.age_years < 0:
            raise PhotopicDomainError(f'Observer age must not be negative, got {self.age_years}')
        _check_wavelength(self.lambda_nm)


def _check_wavelength(lambda_nm):
    if not PHOTOPIC_START_NM <= lambda_nm <= PHOTOPIC_END_NM:
        raise PhotopicDomainError(
            f'Wavelength {lambda_nm} nm is outside the photopic table '
            f'({PHOTOPIC_START_NM}-{PHOTOPIC_END_NM} nm)'
        )


def mw_per_cm2_to_w_per_m2(value):
    """Convert an irradiance from mW/cm^2 to W/m^2."""
    return value * MW_PER_CM2_IN_W_PER_M2


def g_eye(theta_deg, age_years, pigment):
    """Return the glare scattering function of the eye in sr^-1.

    Raises:
        PhotopicDomainError: if theta_deg is not positive.
    """
    if not theta_deg > 0:
        raise PhotopicDomainError(f'Glare scattering is singular at theta={theta_deg}')
    age_factor = 1 + (age_years / 62.5) ** 2
    return (10 / theta_deg ** 3
            + (5 / theta_deg ** 2 + 0.1 * pigment / theta_deg) * age_factor
            + 0.0025 * pigment)


def f_eye(scene):
    """Return the effective solid angle the eye collects, S * L_b^T * g_eye."""
    return scene.s_coeff * scene.l_b ** scene.t_exponent * g_eye(
        scene.theta_deg, scene.age_years, scene.pigment
    )


def photopic_efficacy(lambda_nm):
    """Return V(lambda) by linear interpolation of the CIE photopic table."""
    _check_wavelength(lambda_nm)
    return float(np.interp(lambda_nm, _WAVELENGTHS, _EFFICIENCY))


def source_luminance(duty_cycle, scene):
    """Return the luminance of the attacking source as seen by the observer."""
    if not 0 <= duty_cycle <= 1:
        raise PhotopicDomainError(f'Duty cycle must lie in [0, 1], got {duty_cycle}')
    return (duty_cycle * scene.e_sensor * LUMINOUS_EFFICACY
            * photopic_efficacy(scene.lambda_nm) * f_eye(scene))


def contrast(l_as, l_b):
    """Return the contrast of a source of luminance l_as against l_b."""
    if not l_b > 0:
        raise PhotopicDomainError(f'Background luminance must be positive, got {l_b}')
    return (l_as - l_b) / l_b


def duty_cycle_threshold(scene):
    """Return the largest duty cycle at which the source stays imperceptible."""
    c_thr = scene.c_thr(scene.l_b)
    return (scene.l_b ** (1 - scene.t_exponent) * (c_thr + 1)
            / (scene.e_sensor * LUMINOUS_EFFICACY * photopic_efficacy(scene.lambda_nm)
               * scene.s_coeff * g_eye(scene.theta_deg, scene.age_years, scene.pigment)))


def duty_cycle_of_train(pulse_count, width_us, frame_rate_hz):
    """Return the fraction of time a source emitting pulse_count pulses per frame is on."""
    if pulse_count < 0 or width_us < 0 or frame_rate_hz < 0:
        raise PhotopicDomainError('Pulse count, width and frame rate must not be negative')
    return pulse_count * width_us * frame_rate_hz / 1e6


def threshold_surface(theta_grid, l_b_grid, scene_base):
    """Evaluate duty_cycle_threshold over the Cartesian (theta, l_b) grid.

    Returns:
        list of tuple: (theta_deg, l_b, duty_cycle) sorted by theta, then l_b.

    Raises:
        PhotopicDomainError: if a grid is empty, or for the first failing grid
            point, naming its coordinates.
    """
    if not len(theta_grid) or not len(l_b_grid):
        raise PhotopicDomainError('Threshold grids must not be empty')
    rows = []
    for theta in sorted(theta_grid):
        for l_b in sorted(l_b_grid):
            try:
                scene = replace(scene_base, theta_deg=theta, l_b=l_b)
                rows.append((theta, l_b, duty_cycle_threshold(scene)))
            except PhotopicDomainError as err:
                raise PhotopicDomainError(f'At theta_deg={theta}, l_b={l_b}: {err}') from err
    return rows


def calibrate_scattering(anchors, base_scene):
    """Solve S and T so that the threshold passes exactly through two anchors.

    Each anchor is (theta_deg, duty_cycle, l_b). Taking logarithms of the
    threshold gives ln(d.c.) + ln(e*683*V) + ln(g) - ln(C+1) = (1-T) ln(L_b) - ln(S),
    which is linear in (1-T, ln S).

    Raises:
        PhotopicDomainError: if fewer than two anchors are given or the anchors
            share a background luminance, which leaves T undetermined.
    """
    if len(anchors) != 2:
        raise PhotopicDomainError(f'Calibration needs exactly two anchors, got {len(anchors)}')
    source = base_scene.e_sensor * LUMINOUS_EFFICACY * photopic_efficacy(base_scene.lambda_nm)
    logs = []
    for theta, duty_cycle, l_b in anchors:
        if not duty_cycle > 0 or not l_b > 0:
            raise PhotopicDomainError(f'Anchor ({theta}, {duty_cycle}, {l_b}) must be positive')
        g = g_eye(theta, base_scene.age_years, base_scene.pigment)
        y = math.log(duty_cycle) + math.log(source) + math.log(g) - math.log(base_scene.c_thr(l_b) + 1)
        logs.append((math.log(l_b), y))
    (x1, y1), (x2, y2) = logs
    if x1 == x2:
        raise PhotopicDomainError(
            'Calibration anchors share a background luminance; the angular ratio alone fixes '
            'neither S nor T'
        )
    one_minus_t = (y2 - y1) / (x2 - x1)
    log_s = one_minus_t * x1 - y1
    s_coeff, t_exponent = math.exp(log_s), 1 - one_minus_t
    LOGGER.debug('Calibrated scattering S=%s T=%s', s_coeff, t_exponent)
    return s_coeff, t_exponent


@lru_cache(maxsize=None)
def _reference_scattering():
    base = PhotopicScene(
        theta_deg=CALIBRATION_ANCHORS[0][0], age_years=REFERENCE_AGE_YEARS,
        pigment=REFERENCE_PIGMENT, l_b=REFERENCE_L_B, e_sensor=REFERENCE_E_SENSOR,
        lambda_nm=REFERENCE_LAMBDA_NM, s_coeff=1.0, t_exponent=0.0,
    )
    return calibrate_scattering(CALIBRATION_ANCHORS, base)


def calibrated_scene(**overrides):
    """Return the reference scene with S and T from the built-in calibration.

    Keyword arguments override any PhotopicScene field.
    """
    s_coeff, t_exponent = _reference_scattering()
    values = {
        'theta_deg': CALIBRATION_ANCHORS[0][0],
        'age_years': REFERENCE_AGE_YEARS,
        'pigment': REFERENCE_PIGMENT,
        'l_b': REFERENCE_L_B,
        'e_sensor': REFERENCE_E_SENSOR,
        'lambda_nm': REFERENCE_LAMBDA_NM,
        's_coeff': s_coeff,
        't_exponent': t_exponent,
    }
    values.update(overrides)
    return PhotopicScene(**values)


def imperceptible_angle(duty_cycle, scene):
    """Return the smallest viewing angle at which `duty_cycle` is imperceptible.

    Raises:
        PhotopicDomainError: if the source is visible even at 90 degrees.
    """
    def margin(theta):
        return duty_cycle_threshold(replace(scene, theta_deg=theta)) - duty_cycle

    if margin(MIN_VIEWING_ANGLE_DEG) >= 0:
        return MIN_VIEWING_ANGLE_DEG
    if margin(MAX_VIEWING_ANGLE_DEG) < 0:
        raise PhotopicDomainError(
            f'Duty cycle {duty_cycle} is perceptible at every angle up to {MAX_VIEWING_ANGLE_DEG} degrees'
        )
    return float(brentq(margin, MIN_VIEWING_ANGLE_DEG, MAX_VIEWING_ANGLE_DEG, xtol=1e-9))
