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
The differentiable classifier abstraction and the in-process classifier model.
"""

import io
import logging
import zipfile

import numpy as np
from scipy.special import logsumexp, softmax as _softmax
import yaml

from rolling_dazzle.classifier import (
    BUNDLED_CLASSES,
    BUNDLED_FILTERS,
    BUNDLED_HIDDEN_UNITS,
    BUNDLED_INPUT_SHAPE,
    SHAPE_NAMES,
    WEIGHTS_FORMAT_VERSION,
    WEIGHTS_MANIFEST_MEMBER,
    ZIP_MEMBER_DATE_TIME,
)
from rolling_dazzle.classifier.layers import Conv3x3, Dense, Flatten, MaxPool2, ReLU
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.util import make_generator

LOGGER = logging.getLogger(__name__)


class ClassifierError(DazzleDomainError):
    """A classifier was built or called with inconsistent shapes or labels."""


def softmax(logits):
    """Return the softmax of a logit vector, or of each row of a batch."""
    return _softmax(np.asarray(logits, dtype=float), axis=-1)


def cross_entropy_loss(logits, label):
    """Return -log(softmax(logits)[label]).

    Raises:
        ClassifierError: if label is not a class index.
    """
    logits = np.asarray(logits, dtype=float)
    _check_label(label, logits.shape[-1])
    return float(logsumexp(logits) - logits[label])


def _check_label(label, num_classes):
    if not 0 <= int(label) < num_classes:
        raise ClassifierError(f'Label {label} is outside the {num_classes} classes')


class Classifier:
    """A differentiable image classifier.

    Subclasses provide num_classes, input_shape, logits and input_gradient;
    the batch forms default to one call per image.
    """
    num_classes = None
    input_shape = None
    labels = ()

    def logits(self, x):
        """Return the K logits of one image."""
        raise NotImplementedError

    def input_gradient(self, x, label):
        """Return d cross_entropy_loss(logits(x), label) / dx, shaped like x."""
        raise NotImplementedError

    def logits_batch(self, xs):
        """Return the logits of a batch of images, one row per image."""
        return np.stack([self.logits(x) for x in xs])

    def loss_and_gradient_batch(self, xs, labels):
        """Return the losses and input gradients of a batch of images."""
        losses = []
        grads = []
        for x, label in zip(xs, labels):
            losses.append(cross_entropy_loss(self.logits(x), label))
            grads.append(self.input_gradient(x, label))
        return np.asarray(losses), np.stack(grads)

    def label_name(self, label):
        """Return the human-readable name of a class index."""
        if self.labels and 0 <= label < len(self.labels):
            return self.labels[label]
        return str(label)


def _build_layers(architecture, input_shape):
    layers = []
    shape = tuple(input_shape)
    for index, spec in enumerate(architecture):
        name = f'layer{index}'
        kind = spec.get('type')
        if kind == 'conv3x3':
            if len(shape) != 3:
                raise ClassifierError(f'{name}: conv3x3 needs an image input, got shape {shape}')
            layer = Conv3x3(name, shape[2], int(spec['filters']))
        elif kind == 'dense':
            if len(shape) != 1:
                raise ClassifierError(f'{name}: dense needs a flat input, got shape {shape}')
            layer = Dense(name, shape[0], int(spec['units']))
        elif kind == 'relu':
            layer = ReLU(name)
        elif kind == 'maxpool2':
            if len(shape) != 3 or shape[0] % 2 or shape[1] % 2:
                raise ClassifierError(f'{name}: maxpool2 needs even image sides, got shape {shape}')
            layer = MaxPool2(name)
        elif kind == 'flatten':
            layer = Flatten(name)
        else:
            raise ClassifierError(f'{name}: unknown layer type {kind!r}')
        shape = layer.output_shape(shape)
        layers.append(layer)
    return layers, shape


class ClassifierModel(Classifier):
    """A feed-forward classifier held in process.

    Attributes:
        architecture (tuple of dict): the layer list, e.g. {'type': 'dense', 'units': 10}.
        params (dict): parameter name to numpy array.
        labels (tuple of str): the K class names.
        input_shape (tuple): H x W x C of one image.
        num_classes (int): K.

    Models are immutable: training creates new models with with_params().
    """

    def __init__(self, architecture, params, labels, input_shape):
        self.architecture = tuple(dict(spec) for spec in architecture)
        self.input_shape = tuple(int(v) for v in input_shape)
        self.layers, output_shape = _build_layers(self.architecture, self.input_shape)
        if len(output_shape) != 1 or output_shape[0] < 2:
            raise ClassifierError(f'A classifier needs at least two output logits, got shape {output_shape}')
        self.num_classes = output_shape[0]
        self.labels = tuple(labels)
        if len(self.labels) != self.num_classes:
            raise ClassifierError(f'{len(self.labels)} labels given for {self.num_classes} classes')

        expected = self.param_shapes()
        if set(params) != set(expected):
            raise ClassifierError(
                f'Parameters {sorted(params)} do not match the architecture {sorted(expected)}'
            )
        self.params = {}
        for name, shape in expected.items():
            value = np.array(params[name], dtype=float)
            if value.shape != shape:
                raise ClassifierError(f'Parameter {name} has shape {value.shape}, expected {shape}')
            value.setflags(write=False)
            self.params[name] = value

    def param_shapes(self):
        """dict: parameter name to shape, in layer order."""
        shapes = {}
        for layer in self.layers:
            shapes.update(layer.param_shapes())
        return shapes

    def with_params(self, params):
        """Return a model with the same architecture and new parameters."""
        return ClassifierModel(self.architecture, params, self.labels, self.input_shape)

    def _check_batch(self, xs):
        xs = np.asarray(xs, dtype=float)
        if xs.shape[1:] != self.input_shape:
            raise ClassifierError(
                f'Image of shape {xs.shape[1:]} does not match the model input {self.input_shape}'
            )
        return xs

    def forward(self, xs):
        """Return the logits of a batch and the caches of every layer."""
        out = self._check_batch(xs)
        caches = []
        for layer in self.layers:
            out, cache = layer.forward(self.params, out)
            caches.append(cache)
        return out, caches

    def backward(self, grad_logits, caches):
        """Return the input gradient and the parameter gradients for a batch."""
        grad = grad_logits
        param_grads = {}
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            grad, layer_grads = layer.backward(self.params, grad, cache)
            param_grads.update(layer_grads)
        return grad, param_grads

    def logits(self, x):
        return self.logits_batch(np.asarray(x)[np.newaxis])[0]

    def logits_batch(self, xs):
        out, _ = self.forward(xs)
        return out

    def input_gradient(self, x, label):
        _, grads = self.loss_and_gradient_batch(np.asarray(x)[np.newaxis], [label])
        return grads[0]

    def loss_and_gradient_batch(self, xs, labels):
        out, caches = self.forward(xs)
        losses, grad_logits = _loss_and_logit_gradient(out, labels, self.num_classes)
        grad_x, _ = self.backward(grad_logits, caches)
        return losses, grad_x

    def param_gradient(self, xs, labels):
        """Return the mean batch loss and its gradient with respect to every parameter."""
        out, caches = self.forward(xs)
        losses, grad_logits = _loss_and_logit_gradient(out, labels, self.num_classes)
        _, param_grads = self.backward(grad_logits / len(losses), caches)
        return float(losses.mean()), param_grads


def _loss_and_logit_gradient(out, labels, num_classes):
    labels = np.asarray(labels, dtype=int)
    for label in labels:
        _check_label(label, num_classes)
    rows = np.arange(len(labels))
    losses = logsumexp(out, axis=1) - out[rows, labels]
    grad_logits = softmax(out)
    grad_logits[rows, labels] -= 1.0
    return losses, grad_logits


def logits(model, x):
    """Return the logits of one image."""
    return model.logits(x)


def input_gradient(model, x, label):
    """Return the gradient of the cross-entropy loss with respect to the image."""
    return model.input_gradient(x, label)


def predict(model, x):
    """Return the predicted label and the class probabilities of one image."""
    probabilities = softmax(model.logits(x))
    return int(np.argmax(probabilities)), probabilities


def bundled_architecture(num_classes=BUNDLED_CLASSES):
    """Return the layer list of the bundled convolutional classifier."""
    first, second = BUNDLED_FILTERS
    return (
        {'type': 'conv3x3', 'filters': first},
        {'type': 'relu'},
        {'type': 'maxpool2'},
        {'type': 'conv3x3', 'filters': second},
        {'type': 'relu'},
        {'type': 'maxpool2'},
        {'type': 'flatten'},
        {'type': 'dense', 'units': BUNDLED_HIDDEN_UNITS},
        {'type': 'relu'},
        {'type': 'dense', 'units': num_classes},
    )


def initial_model(architecture, input_shape, labels, seed):
    """Return a model with He-normal weights and zero biases drawn from `seed`."""
    layers, _ = _build_layers(architecture, input_shape)
    rng = make_generator(seed, 'classifier-init')
    params = {}
    for layer in layers:
        for name, shape in layer.param_shapes().items():
            if name.endswith('.W'):
                params[name] = rng.standard_normal(shape) * np.sqrt(2.0 / layer.fan_in())
            else:
                params[name] = np.zeros(shape)
    return ClassifierModel(architecture, params, labels, input_shape)


def bundled_model(seed, num_classes=BUNDLED_CLASSES, input_shape=BUNDLED_INPUT_SHAPE):
    """Return the untrained bundled classifier."""
    return initial_model(bundled_architecture(num_classes), input_shape,
                         SHAPE_NAMES[:num_classes], seed)


def linear_model(weights, bias, input_shape, labels=None):
    """Return the classifier logits = weights @ x.ravel() + bias.

    Args:
        weights (array-like): K x n grid, n being the pixel count of input_shape.
        bias (array-like): K offsets.
        input_shape (tuple): H x W x C.
        labels (sequence of str): class names, default '0'..'K-1'.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2:
        raise ClassifierError(f'Linear weights must be a K x n grid, got shape {weights.shape}')
    num_classes = weights.shape[0]
    architecture = ({'type': 'flatten'}, {'type': 'dense', 'units': num_classes})
    params = {'layer1.W': weights.T, 'layer1.b': bias}
    if labels is None:
        labels = tuple(str(i) for i in range(num_classes))
    return ClassifierModel(architecture, params, labels, input_shape)


def _zip_member(archive, name, data):
    info = zipfile.ZipInfo(name, date_time=ZIP_MEMBER_DATE_TIME)
    info.external_attr = 0o644 << 16
    archive.writestr(info, data, compress_type=zipfile.ZIP_DEFLATED)


def save_weights(model, path):
    """Write a model to a zip container of .npy arrays plus a YAML description.

    Member timestamps are fixed, so identical models give identical files.
    """
    description = {
        'format_version': WEIGHTS_FORMAT_VERSION,
        'input_shape': list(model.input_shape),
        'labels': list(model.labels),
        'architecture': [dict(spec) for spec in model.architecture],
        'params': list(model.params),
    }
    with zipfile.ZipFile(path, 'w') as archive:
        _zip_member(archive, WEIGHTS_MANIFEST_MEMBER,
                    yaml.safe_dump(description, sort_keys=True).encode('utf-8'))
        for name, value in model.params.items():
            buffer = io.BytesIO()
            np.save(buffer, value, allow_pickle=False)
            _zip_member(archive, f'{name}.npy', buffer.getvalue())
    LOGGER.info('Wrote classifier weights to %s', path)


def load_weights(path):
    """Read a model written by save_weights.

    Raises:
        ClassifierError: if the file is not a weights container.
    """
    try:
        with zipfile.ZipFile(path) as archive:
            description = yaml.safe_load(archive.read(WEIGHTS_MANIFEST_MEMBER))
            if description.get('format_version') != WEIGHTS_FORMAT_VERSION:
                raise ClassifierError(
                    f'Unsupported weights format {description.get("format_version")!r} in {path}'
                )
            params = {
                name: np.load(io.BytesIO(archive.read(f'{name}.npy')), allow_pickle=False)
                for name in description['params']
            }
    except (OSError, KeyError, zipfile.BadZipFile, yaml.YAMLError) as err:
        raise ClassifierError(f'Cannot read classifier weights from {path}: {err}') from err
    return ClassifierModel(description['architecture'], params, description['labels'],
                           description['input_shape'])
