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
Unit tests for the rolling_dazzle.attack.adam module
"""

import unittest

import numpy as np

from rolling_dazzle.attack.adam import Adam


class TestAdam(unittest.TestCase):
    """Tests for Adam."""

    def test_first_step_follows_sign(self):
        """Test the bias-corrected first step moves every entry by the learning rate."""
        params = {'w': np.array([1.0, -2.0, 3.0])}
        updated = Adam(0.1).step(params, {'w': np.array([4.0, -0.5, 1e-3])})
        np.testing.assert_allclose([0.9, -1.9, 2.9], updated['w'], atol=1e-4)

    def test_does_not_modify_inputs(self):
        """Test step returns new arrays."""
        params = {'w': np.array([1.0, 2.0])}
        Adam(0.5).step(params, {'w': np.array([1.0, 1.0])})
        np.testing.assert_array_equal([1.0, 2.0], params['w'])

    def test_minimizes_quadratic(self):
        """Test Adam finds the minimum of a separable quadratic."""
        target = np.array([0.5, -1.5, 2.0])
        params = {'w': np.zeros(3)}
        optimizer = Adam(0.05)
        for _ in range(2000):
            params = optimizer.step(params, {'w': 2.0 * (params['w'] - target)})
        np.testing.assert_allclose(target, params['w'], atol=1e-2)

    def test_zero_gradient(self):
        """Test a zero gradient leaves the parameters in place."""
        params = {'w': np.array([0.25]), 'b': np.zeros((2, 2))}
        updated = Adam(1.0).step(params, {'w': np.zeros(1), 'b': np.zeros((2, 2))})
        np.testing.assert_array_equal(params['w'], updated['w'])
        np.testing.assert_array_equal(params['b'], updated['b'])
        self.assertEqual({'w', 'b'}, set(updated))
