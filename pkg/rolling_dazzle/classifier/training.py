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
Deterministic training of the bundled classifier on the synthetic dataset.
"""

import logging

import numpy as np

from rolling_dazzle.attack.adam import Adam
from rolling_dazzle.classifier.dataset import render_dataset
from rolling_dazzle.classifier.model import bundled_model
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.util import make_generator

LOGGER = logging.getLogger(__name__)


class TrainingError(DazzleDomainError):
    """Training finished below the required held-out accuracy."""


def accuracy(model, images, labels, batch_size=100):
    """Return the fraction of images whose predicted label is correct."""
    if not len(labels):
        return 0.0
    correct = 0
    for start in range(0, len(labels), batch_size):
        batch = np.asarray(images[start:start + batch_size], dtype=float)
        predicted = np.argmax(model.logits_batch(batch), axis=1)
        correct += int(np.sum(predicted == labels[start:start + batch_size]))
    return correct / len(labels)


def train_bundled(dataset, seed, epochs, batch_size=32, learning_rate=0.002, min_accuracy=0.95):
    """Train the bundled classifier.

    The result depends only on (dataset, seed, epochs, batch_size,
    learning_rate): initialization and minibatch order are drawn from named
    streams of `seed`.

    Args:
        dataset (SyntheticDataset): the data to train and evaluate on.
        seed (int): training seed.
        epochs (int): passes over the training split; 0 returns the initial model.
        batch_size (int): images per Adam step.
        learning_rate (float): Adam step size.
        min_accuracy (float): required held-out accuracy, or None to skip the check.

    Returns:
        ClassifierModel: the trained model.

    Raises:
        TrainingError: if the held-out accuracy ends below min_accuracy.
    """
    model = bundled_model(seed, dataset.num_classes, (dataset.image_size, dataset.image_size, 3))
    if epochs == 0:
        LOGGER.info('No training epochs requested; returning the initial classifier')
        return model

    images, labels = render_dataset(dataset, 'train')
    test_images, test_labels = render_dataset(dataset, 'test')
    rng = make_generator(seed, 'training-order')
    optimizer = Adam(learning_rate)
    params = dict(model.params)
    for epoch in range(epochs):
        order = rng.permutation(len(labels))
        losses = []
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            loss, grads = model.param_gradient(np.asarray(images[batch], dtype=float), labels[batch])
            params = optimizer.step(params, grads)
            model = model.with_params(params)
            losses.append(loss)
        LOGGER.info('Epoch %s/%s: mean training loss %.4f', epoch + 1, epochs, float(np.mean(losses)))

    held_out = accuracy(model, test_images, test_labels)
    LOGGER.info('Held-out accuracy %.4f on %s images', held_out, len(test_labels))
    if min_accuracy is not None and held_out < min_accuracy:
        raise TrainingError(
            f'Held-out accuracy {held_out:.4f} is below the required {min_accuracy:.4f} '
            f'after {epochs} epochs'
        )
    return model
