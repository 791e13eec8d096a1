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
Unit tests for the rolling_dazzle.attack.optimizer module
"""

import unittest

import numpy as np

from rolling_dazzle.attack.optimizer import (
    AttackConfig,
    AttackError,
    RelaxedPulseVector,
    binarize,
    chain_gradient,
    eot_losses,
    objective,
    optimize,
    prune,
    relax,
    relax_derivative,
    relaxed_pattern,
    sparsity_surrogate,
)
from rolling_dazzle.camera_timing import CameraTimings, slot_count
from rolling_dazzle.classifier.dataset import SyntheticDataset, render_dataset
from rolling_dazzle.classifier.model import cross_entropy_loss, predict
from rolling_dazzle.classifier.training import train_bundled
from rolling_dazzle.config import attack_config_from_config, timings_from_config
from rolling_dazzle.constants import DEFAULT_CONFIG
from rolling_dazzle.dazzle_synthesis import PulseTrain, compose, train_pattern
from rolling_dazzle.util import make_generator
from tests.mocks import SLOW_TESTS, SLOW_TESTS_REASON, SMALL_SHAPE, SMALL_TIMINGS, small_image, small_linear_model

N_SLOTS = slot_count(SMALL_TIMINGS)


def finite_difference_gradient(omega, x, label, model, timings, config, shift, h):
    gradient = np.zeros_like(omega)
    for i in range(len(omega)):
        plus, minus = omega.copy(), omega.copy()
        plus[i] += h
        minus[i] -= h
        gradient[i] = (objective(plus, x, label, model, timings, config, [shift])
                       - objective(minus, x, label, model, timings, config, [shift])) / (2 * h)
    return gradient


class TestRelaxation(unittest.TestCase):
    """Tests for relax, relaxed_pattern, sparsity_surrogate and binarize."""

    def test_relax_values(self):
        """Test hand-computed relaxations."""
        self.assertEqual(0.5, relax(0.0))
        self.assertAlmostEqual(0.0024726232, relax(-3.0), places=9)
        self.assertAlmostEqual(1.0 - 0.0024726232, relax(3.0), places=9)
        self.assertEqual(0.5, relax_derivative(0.0))

    def test_relax_derivative(self):
        """Test the derivative against central differences."""
        omega = np.linspace(-4, 4, 17)
        numeric = (relax(omega + 1e-6) - relax(omega - 1e-6)) / 2e-6
        np.testing.assert_allclose(numeric, relax_derivative(omega), atol=1e-8)

    def test_relaxed_pattern(self):
        """Test a relaxed vector spreads each activation over R_n rows."""
        pattern = relaxed_pattern([0.0, -3.0, 3.0], 2, 3, 5)
        np.testing.assert_allclose([0.5, 0.5, relax(-3.0), relax(-3.0), relax(3.0)], pattern.rows)
        self.assertEqual((5, 3), pattern.shape)

    def test_sparsity_modes(self):
        """Test the sum and mean surrogates."""
        self.assertAlmostEqual(1.5, sparsity_surrogate([0.5, 1.0, 0.0]))
        self.assertAlmostEqual(0.5, sparsity_surrogate([0.5, 1.0, 0.0], 'mean'))

    def test_binarize(self):
        """Test binarization at the default and a custom threshold."""
        self.assertEqual((1, 0, 1), binarize([0.0, -0.1, 2.0]))
        self.assertEqual((0, 0, 1), binarize(RelaxedPulseVector((0.0, -0.1, 2.0)), 0.9))

    def test_binarized_pulse_count(self):
        """Test the binarized train has one pulse per activation at or above the threshold."""
        rng = make_generator(3, 'test-binarize')
        for _ in range(50):
            omega = rng.normal(0, 2, size=N_SLOTS)
            train = PulseTrain(binarize(omega), 10.0)
            self.assertEqual(int(np.sum(relax(omega) >= 0.5)), train.pulse_count)

    def test_relaxed_vector_validation(self):
        """Test empty and non-finite relaxed vectors."""
        with self.assertRaises(AttackError):
            RelaxedPulseVector(())
        with self.assertRaises(AttackError):
            RelaxedPulseVector((0.0, float('nan')))


class TestAttackConfig(unittest.TestCase):
    """Tests for AttackConfig validation."""

    def test_defaults_valid(self):
        """Test the defaults and the configuration builder agree."""
        self.assertEqual(AttackConfig(), attack_config_from_config(DEFAULT_CONFIG))

    def test_invalid_fields(self):
        """Test every field outside its range."""
        for kwargs in ({'alpha': -1.0}, {'learning_rate': 0.0}, {'iterations': 0}, {'eot_samples': 0},
                       {'binarize_threshold': 1.0}, {'sparsity_mode': 'max'}, {'max_pulses': -1},
                       {'pulse_width_us': -1.0}, {'strength': 1.5}):
            with self.subTest(**kwargs):
                with self.assertRaises(AttackError):
                    AttackConfig(**kwargs)


class TestObjective(unittest.TestCase):
    """Tests for objective and chain_gradient."""

    def setUp(self):
        self.model = small_linear_model(seed=1)
        self.x = small_image(seed=1)
        self.config = AttackConfig(pulse_width_us=10.0)

    def test_no_classifier_weight(self):
        """Test alpha = 0 leaves only the sparsity term."""
        config = AttackConfig(alpha=0.0, pulse_width_us=10.0)
        omega = np.array([0.0, -1.0, 1.0, -3.0, 2.0])
        value = objective(omega, self.x, 0, self.model, SMALL_TIMINGS, config, [0, 2, 4])
        self.assertAlmostEqual(float(np.sum(relax(omega))), value, places=12)

    def test_pulses_off(self):
        """Test a vector far below zero leaves the clean image."""
        omega = np.full(N_SLOTS, -15.0)
        value = objective(omega, self.x, 2, self.model, SMALL_TIMINGS, self.config, [1])
        clean = cross_entropy_loss(self.model.logits(self.x), 2)
        self.assertAlmostEqual(-clean, value, delta=1e-6)

    def test_matches_brute_force(self):
        """Test each shift against composing the rolled relaxed pattern directly."""
        rng = make_generator(5, 'test-brute-force')
        for _ in range(10):
            omega = rng.uniform(-3, 3, size=N_SLOTS)
            for shift in range(N_SLOTS):
                pattern = relaxed_pattern(np.roll(omega, shift), 3, SMALL_TIMINGS.n_cols,
                                          SMALL_TIMINGS.n_rows_visible)
                attacked = compose(self.x, pattern)
                expected = np.sum(relax(omega)) - cross_entropy_loss(self.model.logits(attacked), 0)
                value = objective(omega, self.x, 0, self.model, SMALL_TIMINGS, self.config, [shift])
                self.assertAlmostEqual(expected, value, places=10)

    def test_exhaustive_average(self):
        """Test the objective over every shift is the mean of the single-shift objectives."""
        omega = make_generator(6, 'test-eot-average').uniform(-2, 2, size=N_SLOTS)
        single = [objective(omega, self.x, 1, self.model, SMALL_TIMINGS, self.config, [s]) for s in range(N_SLOTS)]
        value = objective(omega, self.x, 1, self.model, SMALL_TIMINGS, self.config, range(N_SLOTS))
        self.assertAlmostEqual(float(np.mean(single)), value, places=12)

    def test_binary_limit(self):
        """Test saturated activations reproduce the binary train's losses."""
        train = PulseTrain((1, 0, 0, 1, 0), 10.0)
        omega = 20.0 * (2 * train.as_array() - 1)
        value = objective(omega, self.x, 1, self.model, SMALL_TIMINGS, self.config, range(N_SLOTS))
        losses, _ = eot_losses(train, self.x, 1, self.model, SMALL_TIMINGS)
        self.assertAlmostEqual(train.pulse_count - float(np.mean(losses)), value, places=9)

    def test_gradient_matches_finite_differences(self):
        """Test chain_gradient on random linear models, images and shifts."""
        for seed in range(20):
            with self.subTest(seed=seed):
                rng = make_generator(seed, 'test-chain-gradient')
                model = small_linear_model(seed)
                x = small_image(seed)
                omega = rng.uniform(-2, 0, size=N_SLOTS)
                shift = int(rng.integers(0, N_SLOTS))
                label = int(rng.integers(0, 3))
                analytic = chain_gradient(omega, x, label, model, SMALL_TIMINGS, self.config, shift)
                numeric = finite_difference_gradient(omega, x, label, model, SMALL_TIMINGS, self.config, shift, 1e-4)
                scale = max(np.abs(analytic).max(), 1e-8)
                self.assertLess(np.abs(numeric - analytic).max() / scale, 1e-3)

    def test_gradient_with_overlapping_pulses(self):
        """Test chain_gradient when wide pulses dazzle rows of the next slot."""
        config = AttackConfig(pulse_width_us=40.0, sparsity_mode='mean')
        rng = make_generator(7, 'test-chain-overlap')
        x = small_image(7, high=0.2)
        omega = rng.uniform(-2, -0.5, size=N_SLOTS)
        analytic = chain_gradient(omega, x, 2, self.model, SMALL_TIMINGS, config, 3)
        numeric = finite_difference_gradient(omega, x, 2, self.model, SMALL_TIMINGS, config, 3, 1e-4)
        self.assertLess(np.abs(numeric - analytic).max() / np.abs(analytic).max(), 1e-3)

    def test_clipped_image(self):
        """Test a white image passes no classifier gradient."""
        omega = np.linspace(-1, 1, N_SLOTS)
        gradient = chain_gradient(omega, np.ones(SMALL_SHAPE), 0, self.model, SMALL_TIMINGS, self.config, 0)
        np.testing.assert_allclose(relax_derivative(omega), gradient)

    def test_saturated_relaxation(self):
        """Test the gradient stays finite and zero where tanh saturates."""
        gradient = chain_gradient(np.full(N_SLOTS, 38.0), self.x, 0, self.model, SMALL_TIMINGS, self.config, 2)
        self.assertTrue(np.all(np.isfinite(gradient)))
        np.testing.assert_array_equal(np.zeros(N_SLOTS), gradient)

    def test_wrong_omega_length(self):
        """Test a relaxed vector that does not match the slot count."""
        with self.assertRaises(AttackError):
            objective(np.zeros(N_SLOTS + 1), self.x, 0, self.model, SMALL_TIMINGS, self.config, [0])

    def test_wrong_image_shape(self):
        """Test an image that does not match the sensor."""
        with self.assertRaises(AttackError):
            objective(np.zeros(N_SLOTS), np.zeros((4, 4, 3)), 0, self.model, SMALL_TIMINGS, self.config, [0])

    def test_empty_shifts(self):
        """Test an empty shift sample."""
        with self.assertRaises(AttackError):
            objective(np.zeros(N_SLOTS), self.x, 0, self.model, SMALL_TIMINGS, self.config, [])


class TestEotLosses(unittest.TestCase):
    """Tests for eot_losses."""

    def test_every_shift(self):
        """Test the default visits every slot shift of the train."""
        model = small_linear_model(seed=2)
        x = small_image(seed=2)
        train = PulseTrain((0, 1, 0, 0, 1), 10.0)
        losses, predicted = eot_losses(train, x, 0, model, SMALL_TIMINGS)
        self.assertEqual((N_SLOTS,), losses.shape)
        for shift in range(N_SLOTS):
            attacked = compose(x, train_pattern(train.rolled(shift), SMALL_TIMINGS))
            self.assertAlmostEqual(cross_entropy_loss(model.logits(attacked), 0), losses[shift], places=12)
            self.assertEqual(predict(model, attacked)[0], predicted[shift])


class TestPrune(unittest.TestCase):
    """Tests for prune."""

    def setUp(self):
        self.model = small_linear_model(seed=3)
        self.x = small_image(seed=3)
        self.train = PulseTrain((1, 1, 0, 1, 1), 10.0)

    def test_budget(self):
        """Test pruning enforces the pulse budget on a subset of the pulses."""
        for budget in range(5):
            config = AttackConfig(max_pulses=budget, failure_loss=1e9, pulse_width_us=10.0)
            pruned = prune(self.train, self.x, 0, self.model, SMALL_TIMINGS, config)
            self.assertEqual(min(budget, 4), pruned.pulse_count)
            self.assertTrue(set(pruned.slots) <= set(self.train.slots))

    def test_unreachable_failure_loss(self):
        """Test nothing is removed voluntarily when no removal keeps the loss high enough."""
        config = AttackConfig(max_pulses=None, failure_loss=1e9, pulse_width_us=10.0)
        self.assertEqual(self.train, prune(self.train, self.x, 0, self.model, SMALL_TIMINGS, config))

    def test_removes_every_pulse(self):
        """Test every pulse goes when any loss counts as a failure."""
        config = AttackConfig(max_pulses=None, failure_loss=-1.0, pulse_width_us=10.0)
        self.assertEqual(0, prune(self.train, self.x, 0, self.model, SMALL_TIMINGS, config).pulse_count)

    def test_removes_weakest_pulse(self):
        """Test the removed pulse is the one whose loss is highest without it."""
        config = AttackConfig(max_pulses=3, failure_loss=1e9, pulse_width_us=10.0)
        pruned = prune(self.train, self.x, 0, self.model, SMALL_TIMINGS, config)
        best = max(
            (PulseTrain.from_slots([s for s in self.train.slots if s != slot], N_SLOTS, 10.0)
             for slot in self.train.slots),
            key=lambda t: float(np.mean(eot_losses(t, self.x, 0, self.model, SMALL_TIMINGS)[0])),
        )
        self.assertEqual(best, pruned)


class TestOptimize(unittest.TestCase):
    """Tests for optimize."""

    def setUp(self):
        self.model = small_linear_model(seed=4)
        self.x = small_image(seed=4)

    def test_deterministic(self):
        """Test identical inputs give identical results."""
        config = AttackConfig(iterations=10, eot_samples=3, pulse_width_us=10.0, seed=9)
        first = optimize(self.x, 0, self.model, SMALL_TIMINGS, config)
        second = optimize(self.x, 0, self.model, SMALL_TIMINGS, config)
        self.assertEqual(first, second)
        self.assertEqual(10, len(first.trace))
        self.assertEqual(N_SLOTS, len(first.shift_success))

    def test_no_classifier_weight(self):
        """Test alpha = 0 switches every pulse off."""
        config = AttackConfig(alpha=0.0, iterations=20, eot_samples=2, pulse_width_us=10.0)
        result = optimize(self.x, 0, self.model, SMALL_TIMINGS, config)
        self.assertEqual(0, result.train.pulse_count)
        self.assertFalse(result.success)
        self.assertEqual(0.0, result.duty_cycle)

    def test_budget_respected(self):
        """Test the final train never exceeds max_pulses."""
        config = AttackConfig(alpha=50.0, iterations=30, eot_samples=3, max_pulses=2, pulse_width_us=10.0)
        result = optimize(self.x, 1, self.model, SMALL_TIMINGS, config)
        self.assertLessEqual(result.train.pulse_count, 2)

    def test_result_fields(self):
        """Test the manifest form of a result."""
        config = AttackConfig(iterations=5, eot_samples=2, pulse_width_us=10.0)
        result = optimize(self.x, 2, self.model, SMALL_TIMINGS, config)
        data = result.as_dict()
        self.assertEqual(result.train.slots, data['pulse_slots'])
        self.assertEqual(len(data['shift_success']), N_SLOTS)
        self.assertAlmostEqual(result.success_rate, sum(data['shift_success']) / N_SLOTS)
        self.assertEqual(N_SLOTS, len(result.relaxed.omega))

    def test_wrong_image_shape(self):
        """Test an image that does not match the sensor."""
        with self.assertRaises(AttackError):
            optimize(np.zeros((3, 3, 3)), 0, self.model, SMALL_TIMINGS, AttackConfig())

    @unittest.skipUnless(SLOW_TESTS, SLOW_TESTS_REASON)
    def test_bundled_success_rate(self):
        """Test 4-pulse attacks fool the trained bundled classifier on at least 70% of shifts."""
        dataset = SyntheticDataset(seed=0)
        model = train_bundled(dataset, seed=0, epochs=8)
        images, labels = render_dataset(dataset, 'test')
        clean_errors = [predict(model, np.asarray(x, dtype=float))[0] != int(label)
                        for x, label in zip(images, labels)]
        self.assertLess(sum(clean_errors) / len(clean_errors), 0.05)

        timings = timings_from_config(DEFAULT_CONFIG)
        config = attack_config_from_config(DEFAULT_CONFIG, max_pulses=4)
        results = [optimize(np.asarray(x, dtype=float), int(label), model, timings, config)
                   for x, label in zip(images[:20], labels[:20])]
        self.assertTrue(all(r.train.pulse_count <= 4 for r in results))
        fooled = sum(sum(r.shift_success) for r in results)
        shifts = sum(len(r.shift_success) for r in results)
        self.assertGreaterEqual(fooled / shifts, 0.7)


class TestCameraCompatibility(unittest.TestCase):
    """Tests for attacks on cameras whose row count is not a multiple of R_n."""

    def test_partial_slot(self):
        """Test rows past the last full slot never dazzle."""
        timings = CameraTimings(t_read_us=20.0, t_exp_us=40.0, n_rows_visible=9, n_rows_hidden=0, n_cols=2)
        model = small_linear_model(seed=5, shape=(9, 2, 1))
        x = small_image(seed=5, shape=(9, 2, 1))
        train = PulseTrain((1,) * slot_count(timings), 5.0)
        losses, _ = eot_losses(train, x, 0, model, timings)
        attacked = compose(x, train_pattern(train, timings))
        self.assertEqual(x[8, 0, 0], attacked[8, 0, 0])
        self.assertEqual(slot_count(timings), len(losses))
