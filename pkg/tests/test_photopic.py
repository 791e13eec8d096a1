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
Unit tests for the rolling_dazzle.photopic module
"""

from dataclasses import replace
import math
import unittest

import numpy as np

from rolling_dazzle.constants import CALIBRATION_ANCHORS, REFERENCE_L_B
from rolling_dazzle.photopic import (
    ConstantThreshold,
    PhotopicDomainError,
    PhotopicScene,
    calibrate_scattering,
    calibrated_scene,
    contrast,
    duty_cycle_of_train,
    duty_cycle_threshold,
    f_eye,
    g_eye,
    imperceptible_angle,
    mw_per_cm2_to_w_per_m2,
    photopic_efficacy,
    source_luminance,
    threshold_surface,
)
from rolling_dazzle.util import make_generator


def neutral_scene(**overrides):
    """Return a scene with S = 1 and T = 0."""
    values = {
        'theta_deg': 1.0, 'age_years': 0.0, 'pigment': 0.0, 'l_b': 1.0,
        'e_sensor': 500.0, 'lambda_nm': 555.0, 's_coeff': 1.0, 't_exponent': 0.0,
    }
    values.update(overrides)
    return PhotopicScene(**values)


class TestGlare(unittest.TestCase):
    """Tests for g_eye and f_eye."""

    def test_g_eye_values(self):
        """Test hand-evaluated values of the glare function."""
        self.assertAlmostEqual(15.0, g_eye(1.0, 0.0, 0.0), delta=1e-12)
        self.assertAlmostEqual(20.0, g_eye(1.0, 62.5, 0.0), delta=1e-12)
        self.assertAlmostEqual(0.06, g_eye(10.0, 0.0, 0.0), delta=1e-12)

    def test_g_eye_singular(self):
        """Test the glare function at zero and negative angles."""
        for theta in (0.0, -1.0):
            with self.assertRaises(PhotopicDomainError):
                g_eye(theta, 25.0, 1.0)

    def test_g_eye_monotone(self):
        """Test g_eye decreases with angle and grows with age and pigment."""
        thetas = np.linspace(0.1, 90.0, 200)
        for age in (0.0, 25.0, 70.0):
            for pigment in (0.0, 0.5, 1.0):
                values = [g_eye(t, age, pigment) for t in thetas]
                self.assertTrue(np.all(np.diff(values) < 0))
                self.assertLessEqual(g_eye(5.0, age, pigment), g_eye(5.0, age + 10.0, pigment))
                self.assertLessEqual(g_eye(5.0, age, pigment), g_eye(5.0, age, pigment + 0.5))

    def test_f_eye_neutral(self):
        """Test S = 1, T = 0 leaves g_eye unchanged."""
        scene = neutral_scene(theta_deg=7.0, age_years=30.0, pigment=0.5, l_b=42.0)
        self.assertEqual(g_eye(7.0, 30.0, 0.5), f_eye(scene))

    def test_f_eye_scaled(self):
        """Test S scales g_eye and T = 1 at unit luminance keeps it."""
        self.assertAlmostEqual(30.0, f_eye(neutral_scene(s_coeff=2.0)), places=12)
        self.assertAlmostEqual(2.0 * 15.0, f_eye(neutral_scene(s_coeff=2.0, t_exponent=1.0)), places=12)


class TestLuminance(unittest.TestCase):
    """Tests for photopic_efficacy, source_luminance and contrast."""

    def test_efficacy(self):
        """Test table lookups of V(lambda)."""
        self.assertEqual(1.0, photopic_efficacy(555.0))
        self.assertAlmostEqual(0.107, photopic_efficacy(650.0), places=6)
        self.assertLess(photopic_efficacy(830.0), 1e-6)
        self.assertAlmostEqual((0.107 + 0.0816) / 2, photopic_efficacy(652.5), places=9)

    def test_efficacy_out_of_range(self):
        """Test wavelengths outside the table."""
        for wavelength in (300.0, 900.0):
            with self.assertRaises(PhotopicDomainError):
                photopic_efficacy(wavelength)

    def test_source_luminance(self):
        """Test the hand product of the source luminance."""
        scene = neutral_scene(theta_deg=10.0)
        self.assertAlmostEqual(204.9, source_luminance(0.01, scene), places=9)
        self.assertEqual(0.0, source_luminance(0.0, scene))

    def test_source_luminance_linear(self):
        """Test linearity in the duty cycle and the sensor irradiance."""
        scene = calibrated_scene(theta_deg=12.0)
        base = source_luminance(0.001, scene)
        self.assertAlmostEqual(3 * base, source_luminance(0.003, scene), delta=1e-12 * base)
        self.assertAlmostEqual(2 * base, source_luminance(0.001, replace(scene, e_sensor=2 * scene.e_sensor)),
                               delta=1e-12 * base)

    def test_contrast(self):
        """Test contrast against the background."""
        self.assertEqual(1.0, contrast(20.0, 10.0))
        self.assertEqual(0.0, contrast(10.0, 10.0))
        self.assertEqual(-1.0, contrast(0.0, 10.0))
        with self.assertRaises(PhotopicDomainError):
            contrast(1.0, 0.0)

    def test_unit_conversion(self):
        """Test mW/cm^2 to W/m^2."""
        self.assertEqual(500.0, mw_per_cm2_to_w_per_m2(50.0))
        self.assertEqual(1.0, mw_per_cm2_to_w_per_m2(0.1))


class TestDutyCycleThreshold(unittest.TestCase):
    """Tests for duty_cycle_threshold and its calibration."""

    def test_round_trip(self):
        """Test the source at the threshold has exactly the threshold contrast."""
        rng = make_generator(9, 'test-round-trip')
        for _ in range(100):
            scene = PhotopicScene(
                theta_deg=float(rng.uniform(0.5, 90.0)), age_years=float(rng.uniform(0, 80)),
                pigment=float(rng.uniform(0, 1)), l_b=float(10 ** rng.uniform(-2, 3)),
                e_sensor=float(10 ** rng.uniform(0, 4)), lambda_nm=float(rng.uniform(450, 700)),
                s_coeff=float(10 ** rng.uniform(-3, 1)), t_exponent=float(rng.uniform(-0.5, 1.5)),
                c_thr=ConstantThreshold(float(rng.uniform(0.1, 3.0))),
            )
            threshold = duty_cycle_threshold(scene)
            if threshold > 1:
                scene = replace(scene, e_sensor=scene.e_sensor * threshold * 2)
                threshold = duty_cycle_threshold(scene)
            c_thr = scene.c_thr(scene.l_b)
            recovered = contrast(source_luminance(threshold, scene), scene.l_b)
            self.assertLessEqual(abs(recovered - c_thr), 1e-9 * c_thr)

    def test_calibration_anchors(self):
        """Test the calibrated scene passes through both anchors within 1%."""
        for theta, duty_cycle, l_b in CALIBRATION_ANCHORS:
            threshold = duty_cycle_threshold(calibrated_scene(theta_deg=theta, l_b=l_b))
            self.assertLess(abs(threshold - duty_cycle), 0.01 * duty_cycle)
        self.assertAlmostEqual(0.0001, duty_cycle_threshold(calibrated_scene(theta_deg=5.0, l_b=0.1)))
        self.assertAlmostEqual(0.0085, duty_cycle_threshold(calibrated_scene(theta_deg=15.0, l_b=1.0)))

    def test_calibration_same_background(self):
        """Test anchors sharing one background cannot fix S and T."""
        with self.assertRaises(PhotopicDomainError):
            calibrate_scattering(((5.0, 0.0001, 10.0), (15.0, 0.0085, 10.0)), calibrated_scene())

    def test_increasing_in_angle(self):
        """Test the threshold grows with the viewing angle at every background."""
        thetas = np.linspace(1.0, 90.0, 60)
        for l_b in (0.1, 1.0, 10.0, 100.0):
            values = [duty_cycle_threshold(calibrated_scene(theta_deg=t, l_b=l_b)) for t in thetas]
            self.assertTrue(np.all(np.diff(values) > 0))

    def test_half_percent_above_ten_degrees(self):
        """Test a 0.5% duty cycle stays imperceptible beyond 10 degrees."""
        for theta in np.linspace(10.01, 90.0, 40):
            scene = calibrated_scene(theta_deg=float(theta), l_b=REFERENCE_L_B)
            self.assertGreater(duty_cycle_threshold(scene), 0.005)

    def test_duty_cycle_of_train(self):
        """Test the on fraction of four-pulse trains at 30 Hz."""
        self.assertAlmostEqual(0.00012, duty_cycle_of_train(4, 1.0, 30.0), delta=1e-15)
        self.assertAlmostEqual(0.0084, duty_cycle_of_train(4, 70.0, 30.0), delta=1e-15)
        self.assertEqual(0.0, duty_cycle_of_train(0, 70.0, 30.0))

    def test_duty_cycle_of_train_multiplicative(self):
        """Test the duty cycle is the plain product of its factors."""
        self.assertEqual(7 * 13.5 * 29.97 / 1e6, duty_cycle_of_train(7, 13.5, 29.97))


class TestThresholdSurface(unittest.TestCase):
    """Tests for threshold_surface and imperceptible_angle."""

    def test_single_cell(self):
        """Test a one-point grid equals the scalar threshold."""
        scene = calibrated_scene()
        rows = threshold_surface([15.0], [1.0], scene)
        self.assertEqual([(15.0, 1.0, duty_cycle_threshold(replace(scene, theta_deg=15.0, l_b=1.0)))], rows)

    def test_sorted(self):
        """Test rows are sorted by angle, then background."""
        rows = threshold_surface([30.0, 5.0, 15.0], [10.0, 0.1], calibrated_scene())
        self.assertEqual([(5.0, 0.1), (5.0, 10.0), (15.0, 0.1), (15.0, 10.0), (30.0, 0.1), (30.0, 10.0)],
                         [row[:2] for row in rows])

    def test_empty_grid(self):
        """Test an empty grid."""
        with self.assertRaises(PhotopicDomainError):
            threshold_surface([], [1.0], calibrated_scene())

    def test_bad_grid_point(self):
        """Test the failing grid point is named."""
        with self.assertRaisesRegex(PhotopicDomainError, 'theta_deg=-1'):
            threshold_surface([5.0, -1.0], [1.0], calibrated_scene())

    def test_imperceptible_angle(self):
        """Test the angle at which a duty cycle reaches the threshold."""
        scene = calibrated_scene(l_b=1.0)
        angle = imperceptible_angle(0.0085, scene)
        self.assertAlmostEqual(15.0, angle, places=6)
        self.assertTrue(math.isclose(0.0085, duty_cycle_threshold(replace(scene, theta_deg=angle)),
                                     rel_tol=1e-6))

    def test_imperceptible_everywhere(self):
        """Test a tiny duty cycle is hidden at the smallest angle."""
        self.assertEqual(0.5, imperceptible_angle(1e-12, calibrated_scene()))

    def test_perceptible_everywhere(self):
        """Test a duty cycle visible at every angle."""
        with self.assertRaises(PhotopicDomainError):
            imperceptible_angle(1.0, calibrated_scene(l_b=0.01))
