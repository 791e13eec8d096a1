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
Defines the seeded random generators used throughout rolling_dazzle.

Every random draw goes through a counter-based Philox generator created from
an explicit seed and a stream name, so that independent consumers (dataset
rendering, weight initialization, shift sampling) never share state and the
global numpy generator is never used.
"""

import hashlib

import numpy as np


def _stream_key(stream):
    """Return a stable 64-bit integer for a stream name."""
    return int.from_bytes(hashlib.sha256(stream.encode('utf-8')).digest()[:8], 'little')


def make_generator(seed, stream=''):
    """Return a numpy Generator over Philox for (seed, stream).

    Args:
        seed (int): the run seed.
        stream (str): a name separating independent consumers of one seed.

    Returns:
        numpy.random.Generator
    """
    key = (int(seed) & (2 ** 64 - 1)) | (_stream_key(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))
