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
Procedurally rendered synthetic dataset of colored shapes on textured backgrounds.

Each class pairs a shape with a hue. Objects are placed, rotated and scaled at
random, their bounding square covering about fov_fraction of the image.
"""

import colorsys
from dataclasses import dataclass
import logging
import math

import numpy as np

from rolling_dazzle.classifier import SHAPE_NAMES
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.util import make_generator

LOGGER = logging.getLogger(__name__)

SPLITS = ('train', 'test')


class DatasetError(DazzleDomainError):
    """A synthetic dataset was requested with invalid parameters."""


@dataclass(frozen=True)
class SyntheticDataset:
    """Parameters of a deterministic synthetic dataset.

    Attributes:
        seed (int): generator seed.
        num_classes (int): K, at most the number of shape kinds.
        image_size (int): side of the square RGB images.
        fov_fraction (float): fraction of the field of view the object covers.
        train_size (int): images in the training split.
        test_size (int): images in the held-out split.
    """
    seed: int
    num_classes: int = 10
    image_size: int = 64
    fov_fraction: float = 0.4
    train_size: int = 3000
    test_size: int = 200

    def __post_init__(self):
        if not 2 <= self.num_classes <= len(SHAPE_NAMES):
            raise DatasetError(
                f'num_classes must lie in [2, {len(SHAPE_NAMES)}], got {self.num_classes}'
            )
        if not 0 < self.fov_fraction < 1:
            raise DatasetError(f'fov_fraction must lie in (0, 1), got {self.fov_fraction}')
        if self.image_size < 8:
            raise DatasetError(f'image_size must be at least 8, got {self.image_size}')
        if self.train_size < 0 or self.test_size < 0:
            raise DatasetError('Split sizes must not be negative')

    @property
    def labels(self):
        """tuple of str: class names in label order."""
        return SHAPE_NAMES[:self.num_classes]

    def size_of(self, split):
        """Return the number of images in a split."""
        _check_split(split)
        return self.train_size if split == 'train' else self.test_size

    def object_radius(self):
        """Return the half side, in pixels, of the object's bounding square."""
        return math.sqrt(self.fov_fraction) * self.image_size / 2


def _check_split(split):
    if split not in SPLITS:
        raise DatasetError(f'Unknown split {split!r}; expected one of {SPLITS}')


def shape_mask(kind, u, v):
    """Return the boolean mask of a shape in coordinates scaled to its bounding radius."""
    rho = np.hypot(u, v)
    if kind == 'disk':
        return rho <= 1.0
    if kind == 'square':
        return np.maximum(abs(u), abs(v)) <= 0.8
    if kind == 'triangle':
        root3 = math.sqrt(3.0)
        return (v >= -0.5) & (root3 * u + v <= 1.0) & (-root3 * u + v <= 1.0)
    if kind == 'ring':
        return (rho <= 1.0) & (rho >= 0.55)
    if kind == 'cross':
        return ((abs(u) <= 0.3) & (abs(v) <= 1.0)) | ((abs(v) <= 0.3) & (abs(u) <= 1.0))
    if kind == 'diamond':
        return abs(u) + abs(v) <= 1.0
    if kind == 'bar':
        return (abs(u) <= 1.0) & (abs(v) <= 0.35)
    if kind == 'frame':
        edge = np.maximum(abs(u), abs(v))
        return (edge <= 0.85) & (edge >= 0.5)
    if kind == 'star':
        return rho <= 0.6 + 0.4 * np.cos(5 * np.arctan2(v, u))
    if kind == 'crescent':
        return (rho <= 1.0) & (np.hypot(u - 0.45, v) > 0.75)
    raise DatasetError(f'Unknown shape {kind!r}')


def _background(rng, size):
    level = rng.uniform(0.1, 0.4)
    tilt = rng.uniform(-0.1, 0.1, size=2)
    ramp = np.linspace(-1.0, 1.0, size)
    gradient = level + tilt[0] * ramp[:, np.newaxis] + tilt[1] * ramp[np.newaxis, :]
    tint = rng.uniform(0.8, 1.2, size=3)
    noise = rng.uniform(-0.05, 0.05, size=(size, size, 3))
    return gradient[:, :, np.newaxis] * tint + noise


def render_image(spec, label, rng):
    """Render one image of class `label` from the generator `rng`."""
    size = spec.image_size
    radius = spec.object_radius()
    # the bounding square stays inside the image
    center = rng.uniform(radius, size - radius, size=2)
    angle = rng.uniform(0.0, 2 * math.pi)
    scale = radius * rng.uniform(0.9, 1.0)
    hue = (label / spec.num_classes + rng.uniform(-0.02, 0.02)) % 1.0
    color = np.asarray(colorsys.hsv_to_rgb(hue, rng.uniform(0.7, 1.0), rng.uniform(0.7, 0.9)))

    rows, cols = np.mgrid[0:size, 0:size] + 0.5
    dy = (rows - center[0]) / scale
    dx = (cols - center[1]) / scale
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    u = cos_a * dx + sin_a * dy
    v = -sin_a * dx + cos_a * dy
    mask = shape_mask(SHAPE_NAMES[label], u, v)

    image = _background(rng, size)
    image[mask] = color
    return np.clip(image, 0.0, 1.0)


def render_dataset(spec, split):
    """Render a split of the dataset.

    The training and held-out splits are drawn from disjoint generator streams.

    Returns:
        tuple: images (n x H x W x 3, float32) and labels (n, int).
    """
    count = spec.size_of(split)
    rng = make_generator(spec.seed, f'dataset-{split}')
    labels = rng.permutation(np.arange(count) % spec.num_classes)
    images = np.empty((count, spec.image_size, spec.image_size, 3), dtype=np.float32)
    for index, label in enumerate(labels):
        images[index] = render_image(spec, int(label), rng)
    LOGGER.debug('Rendered %s %s images at fov_fraction %s', count, split, spec.fov_fraction)
    return images, labels.astype(int)
