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
Reads and writes binary portable graymap (P5) and pixmap (P6) images.

Images are numpy arrays with values in [0, 1]: HxW for graymaps and HxWx3 for
pixmaps. Files are written with a maximum value of 255, row-major.
"""

import numpy as np

from rolling_dazzle.errors import DazzleDomainError

MAXVAL = 255
_WHITESPACE = b' \t\r\n'


class PnmError(DazzleDomainError):
    """A file is not a readable binary PGM/PPM image."""


def _header_tokens(data, count):
    """Return `count` header tokens and the offset of the raster."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] not in (b'\n', b'\r'):
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b'#':
            pos += 1
        if start == pos:
            raise PnmError('Truncated PNM header')
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_pnm(data):
    """Decode the bytes of a P5 or P6 file into an array in [0, 1]."""
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b'P5', b'P6'):
        raise PnmError(f'Unsupported PNM type {magic!r}; expected P5 or P6')
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as err:
        raise PnmError(f'Malformed PNM header: {err}') from err
    if width < 1 or height < 1 or not 0 < maxval <= MAXVAL:
        raise PnmError(f'Unsupported PNM geometry {width}x{height} with maxval {maxval}')
    channels = 3 if magic == b'P6' else 1
    expected = width * height * channels
    raster = np.frombuffer(data, dtype=np.uint8, count=expected, offset=offset) \
        if len(data) - offset >= expected else None
    if raster is None:
        raise PnmError(f'PNM raster holds {len(data) - offset} bytes, expected {expected}')
    shape = (height, width, 3) if channels == 3 else (height, width)
    return raster.reshape(shape).astype(float) / maxval


def encode_pnm(image):
    """Encode an HxW or HxWx3 array in [0, 1] as P5 or P6 bytes."""
    image = np.asarray(image, dtype=float)
    if image.ndim == 3 and image.shape[2] == 1:
        image = image[:, :, 0]
    if image.ndim == 2:
        magic = b'P5'
    elif image.ndim == 3 and image.shape[2] == 3:
        magic = b'P6'
    else:
        raise PnmError(f'Cannot encode an image of shape {image.shape} as PNM')
    raster = np.rint(np.clip(image, 0.0, 1.0) * MAXVAL).astype(np.uint8)
    header = b'%s\n%d %d\n%d\n' % (magic, image.shape[1], image.shape[0], MAXVAL)
    return header + raster.tobytes()


def read_pnm(path):
    """Read a P5 or P6 file."""
    with open(path, 'rb') as pnm_file:
        return decode_pnm(pnm_file.read())


def write_pnm(path, image):
    """Write an image as a P5 (graymap) or P6 (pixmap) file."""
    with open(path, 'wb') as pnm_file:
        pnm_file.write(encode_pnm(image))
