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
Constants shared by the classifier modules.
"""

import os

# Seconds to wait for one reply from an external classifier peer
PEER_TIMEOUT_SECONDS = float(os.environ.get('DAZZLE_PEER_TIMEOUT', '120').strip())

# Seconds to wait for a peer to exit after its input is closed
PEER_SHUTDOWN_SECONDS = 5.0

# Bundled convolutional classifier
BUNDLED_INPUT_SHAPE = (64, 64, 3)
BUNDLED_FILTERS = (8, 16)
BUNDLED_HIDDEN_UNITS = 64
BUNDLED_CLASSES = 10

# Weights container
WEIGHTS_FORMAT_VERSION = 1
WEIGHTS_MANIFEST_MEMBER = 'model.yaml'
ZIP_MEMBER_DATE_TIME = (1980, 1, 1, 0, 0, 0)

# Procedurally rendered object classes, in label order
SHAPE_NAMES = (
    'disk', 'square', 'triangle', 'ring', 'cross',
    'diamond', 'bar', 'frame', 'star', 'crescent',
)
