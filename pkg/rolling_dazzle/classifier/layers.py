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
Layers of the bundled classifier with exact reverse-mode gradients.

Every layer works on a batch whose first axis is the sample index, images
being B x H x W x C. A forward pass returns the output and a cache; the
backward pass takes the gradient of the output and the cache and returns the
gradient of the input plus a dict of parameter gradients.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

KERNEL = 3


class Conv3x3:
    """3x3 convolution, stride 1, zero 'same' padding, HWIO weights."""

    def __init__(self, name, in_channels, filters):
        self.name = name
        self.in_channels = in_channels
        self.filters = filters

    def param_shapes(self):
        return {
            f'{self.name}.W': (KERNEL, KERNEL, self.in_channels, self.filters),
            f'{self.name}.b': (self.filters,),
        }

    def fan_in(self):
        return KERNEL * KERNEL * self.in_channels

    def output_shape(self, input_shape):
        height, width, _ = input_shape
        return (height, width, self.filters)

    def forward(self, params, x):
        padded = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
        # B x H x W x C x 3 x 3
        windows = sliding_window_view(padded, (KERNEL, KERNEL), axis=(1, 2))
        out = np.tensordot(windows, params[f'{self.name}.W'], axes=([4, 5, 3], [0, 1, 2]))
        return out + params[f'{self.name}.b'], windows

    def backward(self, params, grad, windows):
        weights = params[f'{self.name}.W']
        d_weights = np.tensordot(windows, grad, axes=([0, 1, 2], [0, 1, 2])).transpose(1, 2, 0, 3)
        d_bias = grad.sum(axis=(0, 1, 2))
        padded = np.pad(grad, ((0, 0), (1, 1), (1, 1), (0, 0)))
        grad_windows = sliding_window_view(padded, (KERNEL, KERNEL), axis=(1, 2))
        flipped = weights[::-1, ::-1]
        d_x = np.tensordot(grad_windows, flipped, axes=([4, 5, 3], [0, 1, 3]))
        return d_x, {f'{self.name}.W': d_weights, f'{self.name}.b': d_bias}


class Dense:
    """Fully connected layer on flattened inputs."""

    def __init__(self, name, in_features, units):
        self.name = name
        self.in_features = in_features
        self.units = units

    def param_shapes(self):
        return {
            f'{self.name}.W': (self.in_features, self.units),
            f'{self.name}.b': (self.units,),
        }

    def fan_in(self):
        return self.in_features

    def output_shape(self, input_shape):
        return (self.units,)

    def forward(self, params, x):
        return x @ params[f'{self.name}.W'] + params[f'{self.name}.b'], x

    def backward(self, params, grad, x):
        d_weights = x.T @ grad
        d_bias = grad.sum(axis=0)
        d_x = grad @ params[f'{self.name}.W'].T
        return d_x, {f'{self.name}.W': d_weights, f'{self.name}.b': d_bias}


class ReLU:
    """Rectified linear unit."""

    def __init__(self, name):
        self.name = name

    def param_shapes(self):
        return {}

    def output_shape(self, input_shape):
        return input_shape

    def forward(self, params, x):
        mask = x > 0
        return x * mask, mask

    def backward(self, params, grad, mask):
        return grad * mask, {}


class MaxPool2:
    """2x2 max pooling with stride 2. Ties route the gradient to the first maximum."""

    def __init__(self, name):
        self.name = name

    def param_shapes(self):
        return {}

    def output_shape(self, input_shape):
        height, width, channels = input_shape
        return (height // 2, width // 2, channels)

    def forward(self, params, x):
        batch, height, width, channels = x.shape
        blocks = x.reshape(batch, height // 2, 2, width // 2, 2, channels)
        blocks = blocks.transpose(0, 1, 3, 5, 2, 4).reshape(batch, height // 2, width // 2, channels, 4)
        index = blocks.argmax(axis=-1)[..., np.newaxis]
        out = np.take_along_axis(blocks, index, axis=-1)[..., 0]
        return out, (x.shape, index)

    def backward(self, params, grad, cache):
        shape, index = cache
        batch, height, width, channels = shape
        blocks = np.zeros(grad.shape + (4,), dtype=grad.dtype)
        np.put_along_axis(blocks, index, grad[..., np.newaxis], axis=-1)
        blocks = blocks.reshape(batch, height // 2, width // 2, channels, 2, 2)
        return blocks.transpose(0, 1, 4, 2, 5, 3).reshape(shape), {}


class Flatten:
    """Flattens each sample to a vector, row-major."""

    def __init__(self, name):
        self.name = name

    def param_shapes(self):
        return {}

    def output_shape(self, input_shape):
        return (int(np.prod(input_shape)),)

    def forward(self, params, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, params, grad, shape):
        return grad.reshape(shape), {}
