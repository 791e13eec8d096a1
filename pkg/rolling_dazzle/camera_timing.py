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
Rolling-shutter scan timing: frame duration, the rows exposure constant, and
the set of sensor rows a light pulse dazzles.

Row i integrates light during the half-open window [i*t_read, i*t_read + t_exp),
so a pulse shorter than t_read that starts on the row grid dazzles exactly
R_n = floor(t_exp / t_read) rows.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from rolling_dazzle.constants import STRIPE_THRESHOLD
from rolling_dazzle.errors import DazzleDomainError

LOGGER = logging.getLogger(__name__)


class CameraTimingError(DazzleDomainError):
    """Camera timings or a pulse event are not physically valid."""


class CalibrationError(DazzleDomainError):
    """The rows exposure constant could not be recovered from an image."""


@dataclass(frozen=True)
class CameraTimings:
    """Timing of a rolling-shutter scan.

    Attributes:
        t_read_us (float): readout duration of one row.
        t_exp_us (float): exposure duration of one row.
        n_rows_visible (int): rows written to the image, N_r.
        n_rows_hidden (int): rows scanned but not written, N_rH.
        n_cols (int): image columns, M.
    """
    t_read_us: float
    t_exp_us: float
    n_rows_visible: int
    n_rows_hidden: int
    n_cols: int

    def __post_init__(self):
        if not self.t_read_us > 0:
            raise CameraTimingError(f't_read_us must be positive, got {self.t_read_us}')
        if not self.t_exp_us > 0:
            raise CameraTimingError(f't_exp_us must be positive, got {self.t_exp_us}')
        if self.t_exp_us < self.t_read_us:
            raise CameraTimingError(
                f't_exp_us ({self.t_exp_us}) must not be shorter than t_read_us ({self.t_read_us})'
            )
        if self.n_rows_visible < 1:
            raise CameraTimingError(f'n_rows_visible must be at least 1, got {self.n_rows_visible}')
        if self.n_rows_hidden < 0:
            raise CameraTimingError(f'n_rows_hidden must not be negative, got {self.n_rows_hidden}')
        if self.n_cols < 1:
            raise CameraTimingError(f'n_cols must be at least 1, got {self.n_cols}')

    @property
    def total_rows(self):
        """int: visible plus hidden rows."""
        return self.n_rows_visible + self.n_rows_hidden

    def as_dict(self):
        """dict: the timings under their run-manifest key names."""
        return {
            't_read_us': self.t_read_us,
            't_exp_us': self.t_exp_us,
            'n_rows_visible': self.n_rows_visible,
            'n_rows_hidden': self.n_rows_hidden,
            'n_cols': self.n_cols,
        }


@dataclass(frozen=True)
class PulseEvent:
    """A light pulse, its onset measured from the start of a frame scan."""
    start_us: float
    width_us: float

    def __post_init__(self):
        if self.width_us < 0:
            raise CameraTimingError(f'Pulse width must not be negative, got {self.width_us}')


def frame_duration(timings):
    """Return the duration in microseconds of scanning one frame."""
    return timings.t_read_us * timings.total_rows + timings.t_exp_us


def frame_rate_hz(timings):
    """Return the frame rate implied by the scan duration."""
    return 1e6 / frame_duration(timings)


def rows_exposure_constant(timings):
    """Return R_n, the number of rows integrating at any instant."""
    return max(1, int(math.floor(timings.t_exp_us / timings.t_read_us)))


def slot_count(timings):
    """Return N, the number of pulse slots per frame.

    Raises:
        CameraTimingError: if a single pulse covers more rows than the sensor has.
    """
    r_n = rows_exposure_constant(timings)
    if r_n > timings.total_rows:
        raise CameraTimingError(
            f'Rows exposure constant {r_n} exceeds the {timings.total_rows} sensor rows'
        )
    return timings.total_rows // r_n


def slot_pulse_start(timings, slot):
    """Return the onset of a pulse that dazzles exactly the rows of `slot`.

    Slot i owns rows i*R_n to (i+1)*R_n - 1. All of them integrate during the
    last t_read before row (i+1)*R_n starts, which is where the pulse is placed.
    """
    n_slots = slot_count(timings)
    if not 0 <= slot < n_slots:
        raise CameraTimingError(f'Slot {slot} is outside the {n_slots} pulse slots')
    r_n = rows_exposure_constant(timings)
    return ((slot + 1) * r_n - 1) * timings.t_read_us


def dazzled_rows(timings, pulse):
    """Return the set of sensor rows (visible and hidden) a pulse dazzles.

    A row is dazzled when its exposure window overlaps the pulse with nonzero
    duration. Pulse times wrap around the frame, so a pulse that starts late in
    one frame may also dazzle the first rows of the next one.

    Args:
        timings (CameraTimings): the scan timing.
        pulse (PulseEvent): the pulse.

    Returns:
        set of int: indices in [0, total_rows).
    """
    if pulse.width_us == 0:
        return set()
    t_frame = frame_duration(timings)
    start = pulse.start_us % t_frame
    end = start + pulse.width_us
    window_starts = np.arange(timings.total_rows) * timings.t_read_us
    hit = np.zeros(timings.total_rows, dtype=bool)
    # frames the pulse can reach, including the previous one for wrapped windows
    for frame in range(-1, int(math.ceil(end / t_frame)) + 1):
        lo = window_starts + frame * t_frame
        hi = lo + timings.t_exp_us
        hit |= np.maximum(lo, start) < np.minimum(hi, end)
    return set(np.flatnonzero(hit).tolist())


def _stripe_runs(dazzled):
    """Return the lengths of consecutive runs of True in a 1-D boolean array."""
    padded = np.concatenate(([False], dazzled, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return (ends - starts).tolist()


def calibrate_rn(stripe_image, threshold=STRIPE_THRESHOLD):
    """Recover R_n from an image of stripes produced by single sub-t_read pulses.

    Rows whose mean exceeds `threshold` of full scale are dazzled. The stripe
    thickness is the length of each run of dazzled rows; the median thickness
    is returned, an even count taking the lower of the two middle values.

    Args:
        stripe_image (numpy.ndarray): HxW or HxWxC image with values in [0, 1].
        threshold (float): row-mean level marking a saturated row.

    Returns:
        int: the measured rows exposure constant.

    Raises:
        CalibrationError: if no row exceeds the threshold.
    """
    image = np.asarray(stripe_image, dtype=float)
    if image.ndim not in (2, 3) or image.size == 0:
        raise CalibrationError(f'Expected a non-empty HxW or HxWxC image, got shape {image.shape}')
    row_means = image.reshape(image.shape[0], -1).mean(axis=1)
    runs = sorted(_stripe_runs(row_means > threshold))
    if not runs:
        raise CalibrationError(f'No stripe found: no row mean exceeds {threshold} of full scale')
    LOGGER.debug('Found %s stripes with thicknesses %s', len(runs), runs)
    return int(runs[(len(runs) - 1) // 2])
