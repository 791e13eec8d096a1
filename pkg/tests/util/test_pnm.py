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
Unit tests for the rolling_dazzle.util.pnm module
"""

import os
import tempfile
import unittest

import numpy as np

from rolling_dazzle.util.pnm import PnmError, decode_pnm, encode_pnm, read_pnm, write_pnm


class TestPnm(unittest.TestCase):
    """Tests for reading and writing P5 and P6 images."""

    def test_encode_graymap(self):
        """Test the bytes of a 2x3 graymap."""
        image = np.array([[0.0, 0.5, 1.0], [1.0, 0.0, 0.2]])
        self.assertEqual(b'P5\n3 2\n255\n' + bytes([0, 128, 255, 255, 0, 51]), encode_pnm(image))

    def test_encode_pixmap(self):
        """Test the bytes of a 1x2 pixmap."""
        image = np.array([[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]])
        self.assertEqual(b'P6\n2 1\n255\n' + bytes([255, 0, 0, 0, 0, 255]), encode_pnm(image))

    def test_single_channel(self):
        """Test an HxWx1 image is written as a graymap."""
        self.assertTrue(encode_pnm(np.zeros((2, 2, 1))).startswith(b'P5'))

    def test_clipped(self):
        """Test values outside [0, 1] are clipped."""
        self.assertEqual(bytes([0, 255]), encode_pnm(np.array([[-0.5, 2.0]]))[-2:])

    def test_decode_with_comment(self):
        """Test a header with a comment and a maxval below 255."""
        data = b'P5\n# made by hand\n2 1\n# max\n15\n' + bytes([15, 5])
        np.testing.assert_allclose([[1.0, 1.0 / 3.0]], decode_pnm(data))

    def test_decode_pixmap(self):
        """Test decoding a pixmap into H x W x 3."""
        decoded = decode_pnm(b'P6 1 2 255 ' + bytes([255, 0, 0, 0, 255, 0]))
        np.testing.assert_array_equal([[[1, 0, 0]], [[0, 1, 0]]], decoded)

    def test_unsupported_type(self):
        """Test an ASCII graymap is rejected."""
        with self.assertRaisesRegex(PnmError, 'Unsupported PNM type'):
            decode_pnm(b'P2\n1 1\n255\n0\n')

    def test_large_maxval(self):
        """Test a 16-bit graymap is rejected."""
        with self.assertRaises(PnmError):
            decode_pnm(b'P5\n1 1\n65535\n' + bytes(2))

    def test_truncated_raster(self):
        """Test a raster shorter than the header announces."""
        with self.assertRaisesRegex(PnmError, 'raster'):
            decode_pnm(b'P5\n2 2\n255\n' + bytes(3))

    def test_truncated_header(self):
        """Test a header that ends early."""
        with self.assertRaises(PnmError):
            decode_pnm(b'P5\n2')

    def test_file_round_trip(self):
        """Test an 8-bit image survives writing and reading."""
        image = np.arange(24, dtype=float).reshape(2, 4, 3) / 255.0
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, 'image.ppm')
            write_pnm(path, image)
            np.testing.assert_allclose(image, read_pnm(path), atol=1e-12)
