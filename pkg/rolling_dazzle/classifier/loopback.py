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
Reference peer for the external classifier protocol.

Serves a seeded linear model over standard input and output. Logging goes to
standard error because standard output carries the protocol.

Usage: python -m rolling_dazzle.classifier.loopback [--seed N] [--classes K] [--shape H,W,C]
"""

import argparse
import json
import logging
import sys

import numpy as np

from rolling_dazzle.classifier.model import ClassifierError, linear_model
from rolling_dazzle.logging import configure_logging
from rolling_dazzle.util import make_generator

LOGGER = logging.getLogger(__name__)

DEFAULT_SHAPE = (8, 8, 3)
WEIGHT_SCALE = 0.1


def loopback_model(seed=0, classes=2, shape=DEFAULT_SHAPE):
    """Return the linear model the loopback peer serves for these arguments."""
    rng = make_generator(seed, 'loopback')
    pixels = int(np.prod(shape))
    weights = rng.standard_normal((classes, pixels)) * WEIGHT_SCALE
    bias = rng.standard_normal(classes) * WEIGHT_SCALE
    return linear_model(weights, bias, shape)


def handle_request(model, request):
    """Return the reply to one decoded request."""
    request_id = request.get('id')
    try:
        shape = tuple(request['shape'])
        x = np.asarray(request['pixels'], dtype=float).reshape(shape)
        if request.get('op') == 'logits':
            return {'id': request_id, 'logits': model.logits(x).tolist()}
        if request.get('op') == 'grad':
            return {'id': request_id, 'grad': model.input_gradient(x, request['label']).ravel().tolist()}
        return {'id': request_id, 'error': f'unknown op {request.get("op")!r}'}
    except (KeyError, TypeError, ValueError, ClassifierError) as err:
        return {'id': request_id, 'error': f'{type(err).__name__}: {err}'}


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description='Loopback external classifier peer')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--classes', type=int, default=2)
    parser.add_argument('--shape', default=','.join(str(v) for v in DEFAULT_SHAPE),
                        help='input shape as H,W,C')
    args = parser.parse_args(argv)
    try:
        args.shape = tuple(int(v) for v in args.shape.split(','))
    except ValueError:
        parser.error(f'--shape must be H,W,C integers, got {args.shape!r}')
    if len(args.shape) != 3:
        parser.error(f'--shape must have three entries, got {args.shape}')
    return args


def main(argv=None):
    """Serve requests until standard input closes."""
    configure_logging(stream=sys.stderr)
    args = parse_args(argv)
    model = loopback_model(args.seed, args.classes, args.shape)
    LOGGER.info('Loopback peer serving %s classes for input %s', args.classes, args.shape)

    print(json.dumps({'classes': model.num_classes, 'shape': list(model.input_shape)}), flush=True)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as err:
            LOGGER.error('Ignoring a request that is not JSON: %s', err)
            continue
        if not isinstance(request, dict):
            LOGGER.error('Ignoring a request that is not a JSON object')
            continue
        print(json.dumps(handle_request(model, request)), flush=True)


if __name__ == '__main__':
    main()
