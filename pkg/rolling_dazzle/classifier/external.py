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
Session with a classifier running in a separate process.

The peer is spoken to over its standard input and output, one JSON object per
line. It first announces itself with {"classes": K} (optionally with a
"shape"), then answers every request with the same id:

    request  {"id": n, "op": "logits", "shape": [h, w, c], "pixels": [...]}
    reply    {"id": n, "logits": [...]}

    request  {"id": n, "op": "grad", "label": l, "shape": [h, w, c], "pixels": [...]}
    reply    {"id": n, "grad": [...]}

A reply {"id": n, "error": "..."} reports a failure of the peer.
"""

import json
import logging
import queue
import shlex
import subprocess
import threading

import numpy as np

from rolling_dazzle.classifier import PEER_SHUTDOWN_SECONDS, PEER_TIMEOUT_SECONDS
from rolling_dazzle.classifier.model import Classifier, ClassifierError

LOGGER = logging.getLogger(__name__)

_EOF = object()


class ClassifierSessionError(Exception):
    """The external classifier peer failed, timed out or exited."""


class ProtocolError(ClassifierSessionError):
    """The external classifier peer sent a message that violates the wire protocol."""


def _parse_command(command):
    if isinstance(command, str):
        argv = shlex.split(command)
    else:
        argv = [str(arg) for arg in command]
    if not argv:
        raise ClassifierSessionError('No external classifier command given')
    return argv


def _number_list(message, field, expected_length):
    values = message.get(field)
    if not isinstance(values, list):
        raise ProtocolError(f'Reply field {field!r} must be a list, got {type(values).__name__}')
    if len(values) != expected_length:
        raise ProtocolError(f'Reply field {field!r} has {len(values)} values, expected {expected_length}')
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ProtocolError(f'Reply field {field!r} must hold only numbers')
    return np.asarray(values, dtype=float)


class ExternalClassifierSession(Classifier):
    """A classifier handle backed by a peer process.

    Only one request is in flight at a time; callers sharing a session must
    serialize their calls.

    Args:
        command (str or list): the peer's command line.
        timeout (float): seconds to wait for any single message.
    """

    def __init__(self, command, timeout=PEER_TIMEOUT_SECONDS):
        self.argv = _parse_command(command)
        self.timeout = timeout
        self.next_id = 1
        self.abandoned = set()
        self.lines = queue.Queue()
        LOGGER.info('Starting external classifier: %s', ' '.join(self.argv))
        try:
            self.process = subprocess.Popen(
                self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, encoding='utf-8', bufsize=1,
            )
        except OSError as err:
            raise ClassifierSessionError(f'Cannot start external classifier {self.argv[0]}: {err}') from err
        self.reader = threading.Thread(target=self._read_lines, daemon=True)
        self.reader.start()
        try:
            self._handshake()
        except ClassifierSessionError:
            self.close()
            raise

    def _read_lines(self):
        for line in self.process.stdout:
            self.lines.put(line)
        self.lines.put(_EOF)

    def _receive(self):
        try:
            line = self.lines.get(timeout=self.timeout)
        except queue.Empty as err:
            raise ClassifierSessionError(
                f'External classifier sent nothing for {self.timeout} seconds'
            ) from err
        if line is _EOF:
            try:
                code = self.process.wait(timeout=PEER_SHUTDOWN_SECONDS)
            except subprocess.TimeoutExpired:
                code = None
            raise ClassifierSessionError(f'External classifier closed its output (exit code {code})')
        try:
            message = json.loads(line)
        except json.JSONDecodeError as err:
            raise ProtocolError(f'Reply is not a JSON object: {err}') from err
        if not isinstance(message, dict):
            raise ProtocolError(f'Reply must be a JSON object, got {type(message).__name__}')
        return message

    def _handshake(self):
        message = self._receive()
        classes = message.get('classes')
        if not isinstance(classes, int) or isinstance(classes, bool) or classes < 2:
            raise ProtocolError(f'Handshake field \'classes\' must be an integer >= 2, got {classes!r}')
        self.num_classes = classes
        shape = message.get('shape')
        if shape is not None:
            if not isinstance(shape, list) or len(shape) != 3 or not all(
                    isinstance(v, int) and v > 0 for v in shape):
                raise ProtocolError(f'Handshake field \'shape\' must be [h, w, c], got {shape!r}')
            shape = tuple(shape)
        self.input_shape = shape
        self.labels = tuple(str(i) for i in range(classes))
        LOGGER.debug('External classifier declares %s classes, input shape %s', classes, shape)

    def _request(self, op, x, label=None):
        x = np.asarray(x, dtype=float)
        if x.ndim != 3:
            raise ClassifierError(f'Expected an H x W x C image, got shape {x.shape}')
        if self.input_shape is not None and x.shape != self.input_shape:
            raise ClassifierError(
                f'Image of shape {x.shape} does not match the peer input {self.input_shape}'
            )
        request_id = self.next_id
        self.next_id += 1
        request = {'id': request_id, 'op': op}
        if label is not None:
            request['label'] = int(label)
        request['shape'] = list(x.shape)
        request['pixels'] = x.ravel().tolist()
        try:
            self.process.stdin.write(json.dumps(request) + '\n')
            self.process.stdin.flush()
        except (BrokenPipeError, ValueError) as err:
            raise ClassifierSessionError(f'Cannot write to external classifier: {err}') from err

        reply = self._reply(request_id)
        if 'error' in reply:
            raise ClassifierSessionError(f'External classifier failed: {reply["error"]}')
        return reply, x.shape

    def _reply(self, request_id):
        """Return the reply to `request_id`, dropping late replies to abandoned requests."""
        while True:
            try:
                reply = self._receive()
            except ClassifierSessionError:
                self.abandoned.add(request_id)
                raise
            reply_id = reply.get('id')
            if isinstance(reply_id, int) and reply_id in self.abandoned:
                self.abandoned.discard(reply_id)
                LOGGER.warning('Dropping late reply to abandoned request %s', reply_id)
                continue
            if reply_id != request_id:
                raise ProtocolError(f'Reply field \'id\' is {reply_id!r}, expected {request_id}')
            return reply

    def logits(self, x):
        reply, _ = self._request('logits', x)
        return _number_list(reply, 'logits', self.num_classes)

    def input_gradient(self, x, label):
        if not 0 <= int(label) < self.num_classes:
            raise ClassifierError(f'Label {label} is outside the {self.num_classes} classes')
        reply, shape = self._request('grad', x, label)
        return _number_list(reply, 'grad', int(np.prod(shape))).reshape(shape)

    def close(self):
        """Close the peer's input and wait for it to exit."""
        if self.process.poll() is None:
            try:
                self.process.stdin.close()
                self.process.wait(timeout=PEER_SHUTDOWN_SECONDS)
            except (OSError, subprocess.TimeoutExpired):
                LOGGER.warning('External classifier did not exit; killing it')
                self.process.kill()
                self.process.wait()
        self.reader.join(timeout=PEER_SHUTDOWN_SECONDS)

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def external_classifier_session(command, timeout=PEER_TIMEOUT_SECONDS):
    """Start a peer process and return a classifier handle proxying to it."""
    return ExternalClassifierSession(command, timeout)
