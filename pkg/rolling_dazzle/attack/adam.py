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
Adam optimizer over a dict of numpy parameter arrays.
"""

import numpy as np

from rolling_dazzle.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON


class Adam:
    """Adam with bias-corrected first and second moment estimates.

    step() returns new arrays and never modifies the parameters it is given.
    """

    def __init__(self, learning_rate, beta1=ADAM_BETA1, beta2=ADAM_BETA2, epsilon=ADAM_EPSILON):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.iteration = 0
        self.first_moment = {}
        self.second_moment = {}

    def step(self, params, grads):
        """Return the parameters after one descent step along `grads`.

        Args:
            params (dict): name to numpy array.
            grads (dict): name to the gradient of the minimized loss, same shapes.
        """
        self.iteration += 1
        first_correction = 1 - self.beta1 ** self.iteration
        second_correction = 1 - self.beta2 ** self.iteration
        updated = {}
        for name, value in params.items():
            grad = np.asarray(grads[name], dtype=float)
            m = self.first_moment.get(name, np.zeros_like(grad))
            v = self.second_moment.get(name, np.zeros_like(grad))
            m = self.beta1 * m + (1 - self.beta1) * grad
            v = self.beta2 * v + (1 - self.beta2) * grad * grad
            self.first_moment[name] = m
            self.second_moment[name] = v
            m_hat = m / first_correction
            v_hat = v / second_correction
            updated[name] = value - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
        return updated
