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
Comma-separated tables with fixed floating point formatting.
"""

import csv
import logging

from rolling_dazzle.constants import TABLE_SIGNIFICANT_DIGITS

LOGGER = logging.getLogger(__name__)


def format_value(value):
    """Format a table cell; floats get TABLE_SIGNIFICANT_DIGITS significant digits."""
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f'{value:.{TABLE_SIGNIFICANT_DIGITS}g}'
    return str(value)


def format_series(values):
    """Format a sequence of numbers as one comma-separated string."""
    return ','.join(format_value(float(v)) for v in values)


def write_table(path, header, rows):
    """Write a header line and rows to a comma-separated file."""
    with open(path, 'w', newline='', encoding='utf-8') as table_file:
        writer = csv.writer(table_file, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    LOGGER.info('Wrote %s rows to %s', len(rows), path)


def read_table(path):
    """Read a comma-separated file into its header and rows of strings."""
    with open(path, newline='', encoding='utf-8') as table_file:
        reader = csv.reader(table_file)
        header = next(reader)
        return header, list(reader)
