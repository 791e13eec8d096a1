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
Builds the dazzle perturbation of a pulse train: the Kronecker expansion of
the pulse activity vector into sensor rows and image columns, its shift for
camera asynchrony, its composition onto an image, and the saturated-spot
size law.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging
import math

import numpy as np

from rolling_dazzle.camera_timing import (
    PulseEvent,
    dazzled_rows,
    slot_count,
    slot_pulse_start,
)
from rolling_dazzle.constants import PATTERN_BINARIZE_LEVEL
from rolling_dazzle.errors import DazzleDomainError

LOGGER = logging.getLogger(__name__)


class DazzleSynthesisError(DazzleDomainError):
    """A pattern, pulse train or image has an invalid shape or value."""


@dataclass(frozen=True)
class PulseTrain:
    """Binary laser activity E_eff over the N pulse slots of a frame.

    Attributes:
        activity (tuple of int): 1 where the slot carries a pulse.
        width_us (float): the physical width of every pulse.
    """
    activity: tuple
    width_us: float

    def __post_init__(self):
        activity = tuple(int(v) for v in self.activity)
        if not activity:
            raise DazzleSynthesisError('A pulse train needs at least one slot')
        if any(v not in (0, 1) for v in activity):
            raise DazzleSynthesisError(f'Pulse activity must be binary, got {self.activity}')
        if self.width_us < 0:
            raise DazzleSynthesisError(f'Pulse width must not be negative, got {self.width_us}')
        object.__setattr__(self, 'activity', activity)

    @classmethod
    def from_slots(cls, slots, n_slots, width_us):
        """Create a PulseTrain with pulses at the given slot indices."""
        activity = [0] * n_slots
        for slot in slots:
            if not 0 <= slot < n_slots:
                raise DazzleSynthesisError(f'Slot {slot} is outside the {n_slots} pulse slots')
            activity[slot] = 1
        return cls(tuple(activity), width_us)

    @classmethod
    def empty(cls, timings, width_us):
        """Create a PulseTrain with no pulses for the given camera."""
        return cls((0,) * slot_count(timings), width_us)

    @property
    def n_slots(self):
        """int: N, the length of the activity vector."""
        return len(self.activity)

    @property
    def slots(self):
        """list of int: indices of the active slots."""
        return [i for i, v in enumerate(self.activity) if v]

    @property
    def pulse_count(self):
        """int: the zero norm of the activity vector."""
        return sum(self.activity)

    def as_array(self):
        """numpy.ndarray: the activity vector as floats."""
        return np.asarray(self.activity, dtype=float)

    def rolled(self, shift):
        """Return the train with every pulse moved `shift` slots later, cyclically."""
        return PulseTrain(tuple(np.roll(self.activity, shift).tolist()), self.width_us)


@dataclass(frozen=True)
class DazzlePattern:
    """The N_r x M perturbation added to an image by a pulse train."""
    delta: np.ndarray

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=float)
        if delta.ndim != 2:
            raise DazzleSynthesisError(f'A dazzle pattern is a 2-D grid, got shape {delta.shape}')
        if delta.size and (delta.min() < 0 or delta.max() > 1):
            raise DazzleSynthesisError('Dazzle pattern values must lie in [0, 1]')
        if delta.size and not np.all(delta == delta[:, :1]):
            raise DazzleSynthesisError('Every row of a dazzle pattern must be constant')
        object.__setattr__(self, 'delta', delta)

    @property
    def shape(self):
        """tuple: (rows, columns)."""
        return self.delta.shape

    @property
    def rows(self):
        """numpy.ndarray: the per-row value."""
        return self.delta[:, 0]


@dataclass(frozen=True)
class SaturationModel:
    """Sensor saturation thresholds and the spot-size proportionality constant.

    Attributes:
        i_sat (float): saturation irradiance, W/m^2.
        k_spot (float): spot diameter in pixels at i0 == i_sat.
        avg_dazzle_threshold (float): minimum irradiance averaged over one row
            exposure, W/m^2.
        peak_dazzle_threshold (float): minimum peak irradiance of a short
            pulse, W/m^2.
    """
    i_sat: float = 500.0
    k_spot: float = 1.0
    avg_dazzle_threshold: float = 500.0
    peak_dazzle_threshold: float = 1.0

    def __post_init__(self):
        for name in ('i_sat', 'k_spot', 'avg_dazzle_threshold', 'peak_dazzle_threshold'):
            if not getattr(self, name) > 0:
                raise DazzleSynthesisError(f'{name} must be positive, got {getattr(self, name)}')


def expand_pulse_vector(train, r_n):
    """Return E_r = E_eff (x) 1_{R_n}: each slot repeated over its R_n rows."""
    if r_n < 1:
        raise DazzleSynthesisError(f'Rows exposure constant must be at least 1, got {r_n}')
    return np.kron(train.as_array(), np.ones(int(r_n)))


def pattern_from_rows(e_r, m, n_rows_visible):
    """Broadcast a row indicator over M columns and keep the visible rows.

    Rows past the end of `e_r` are left undazzled.
    """
    if m < 1:
        raise DazzleSynthesisError(f'Column count must be at least 1, got {m}')
    rows = np.zeros(n_rows_visible)
    e_r = np.asarray(e_r, dtype=float)[:n_rows_visible]
    rows[:len(e_r)] = e_r
    return DazzlePattern(np.kron(rows[:, np.newaxis], np.ones((1, int(m)))))


def shift_pattern(e_r, t0_us, t_read_us):
    """Shift a row indicator cyclically by round(t0 / t_read) rows.

    The cycle is the length of `e_r`, the full row cycle it was built over.
    """
    if not t_read_us > 0:
        raise DazzleSynthesisError(f't_read_us must be positive, got {t_read_us}')
    e_r = np.asarray(e_r, dtype=float)
    rows = int(math.floor(t0_us / t_read_us + 0.5))
    return np.roll(e_r, rows)


def pulse_row_extent(width_us, timings):
    """Return how many rows one slot-aligned pulse of the given width dazzles.

    Rows above the first sensor row are not clipped, so a pulse in slot 0 may
    dazzle fewer rows than this count.
    """
    if width_us < 0:
        raise DazzleSynthesisError(f'Pulse width must not be negative, got {width_us}')
    if width_us == 0:
        return 0
    integrating = int(math.ceil(timings.t_exp_us / timings.t_read_us))
    return integrating - 1 + int(math.ceil(width_us / timings.t_read_us))


@lru_cache(maxsize=4096)
def _slot_rows(timings, slot, width_us):
    """Return the sorted sensor rows a pulse in `slot` dazzles."""
    return tuple(sorted(dazzled_rows(timings, PulseEvent(slot_pulse_start(timings, slot), width_us))))


def rows_for_train(train, timings):
    """Return the row indicator over all sensor rows for a pulse train.

    When t_exp is a multiple of t_read and the pulses are shorter than t_read
    this is E_eff (x) 1_{R_n}, padded with the rows that belong to no slot.
    Otherwise a stripe also covers the rows whose exposure window reaches the
    pulse from above, and every t_read of extra width adds a row below.
    """
    _check_train(train, timings)
    rows = np.zeros(timings.total_rows)
    for slot in train.slots:
        rows[list(_slot_rows(timings, slot, train.width_us))] = 1.0
    return rows


def coverage_matrix(timings, width_us):
    """Return the N_r x N matrix mapping slot activity to visible dazzled rows."""
    if width_us < 0:
        raise DazzleSynthesisError(f'Pulse width must not be negative, got {width_us}')
    n_slots = slot_count(timings)
    coverage = np.zeros((timings.n_rows_visible, n_slots))
    for slot in range(n_slots):
        visible = [row for row in _slot_rows(timings, slot, float(width_us)) if row < timings.n_rows_visible]
        coverage[visible, slot] = 1.0
    return coverage


def train_pattern(train, timings):
    """Return the visible dazzle pattern of a pulse train."""
    return pattern_from_rows(rows_for_train(train, timings), timings.n_cols, timings.n_rows_visible)


def pulse_events(train, timings):
    """Return one PulseEvent per active slot of the train."""
    _check_train(train, timings)
    return [PulseEvent(slot_pulse_start(timings, slot), train.width_us) for slot in train.slots]


def render_pulses(timings, events):
    """Render the visible pattern of arbitrary pulses by exposure-window simulation."""
    rows = np.zeros(timings.n_rows_visible)
    for event in events:
        for row in dazzled_rows(timings, event):
            if row < timings.n_rows_visible:
                rows[row] = 1.0
    return pattern_from_rows(rows, timings.n_cols, timings.n_rows_visible)


def compose(x, delta, strength=1.0):
    """Return the attacked image clip(x + strength * delta, 0, 1).

    Args:
        x (numpy.ndarray): HxW or HxWxC image with values in [0, 1].
        delta (DazzlePattern or numpy.ndarray): H x W perturbation.
        strength (float): scale of the perturbation in [0, 1].

    Raises:
        DazzleSynthesisError: if the pattern and image sizes differ or the
            strength is outside [0, 1].
    """
    if not 0 <= strength <= 1:
        raise DazzleSynthesisError(f'Strength must lie in [0, 1], got {strength}')
    x = np.asarray(x, dtype=float)
    grid = delta.delta if isinstance(delta, DazzlePattern) else np.asarray(delta, dtype=float)
    if x.shape[:2] != grid.shape:
        raise DazzleSynthesisError(
            f'Pattern of shape {grid.shape} does not match image of shape {x.shape[:2]}'
        )
    if x.ndim == 3:
        grid = grid[:, :, np.newaxis]
    return np.clip(x + strength * grid, 0.0, 1.0)


def saturated_spot_diameter(i0, model):
    """Return the saturated-spot diameter in pixels for irradiance i0 (W/m^2)."""
    if i0 < 0:
        raise DazzleSynthesisError(f'Irradiance must not be negative, got {i0}')
    if i0 < model.i_sat:
        return 0.0
    return model.k_spot * float(np.cbrt(i0 / model.i_sat))


def dazzle_condition(peak_irradiance, width_us, timings, model):
    """Return True when a pulse is bright enough to dazzle the sensor.

    Both the peak irradiance and the irradiance averaged over one row
    exposure must reach their thresholds.
    """
    if peak_irradiance < 0:
        raise DazzleSynthesisError(f'Irradiance must not be negative, got {peak_irradiance}')
    average = peak_irradiance * min(width_us, timings.t_exp_us) / timings.t_exp_us
    return bool(peak_irradiance >= model.peak_dazzle_threshold and average >= model.avg_dazzle_threshold)


def _binary(pattern):
    grid = pattern.delta if isinstance(pattern, DazzlePattern) else np.asarray(pattern, dtype=float)
    return grid >= PATTERN_BINARIZE_LEVEL


def pattern_agreement(a, b, shift=0):
    """Return the fraction of entries on which `a` and `b` rolled by `shift` rows agree."""
    bin_a, bin_b = _binary(a), _binary(b)
    if bin_a.shape != bin_b.shape:
        raise DazzleSynthesisError(f'Cannot compare patterns of shapes {bin_a.shape} and {bin_b.shape}')
    return float(np.mean(bin_a == np.roll(bin_b, shift, axis=0)))


def pattern_match_score(a, b):
    """Return the best agreement of two patterns over all cyclic row shifts."""
    rows = _binary(a).shape[0]
    return max(pattern_agreement(a, b, shift) for shift in range(rows))


def _check_train(train, timings):
    n_slots = slot_count(timings)
    if train.n_slots != n_slots:
        raise DazzleSynthesisError(
            f'Pulse train has {train.n_slots} slots but the camera has {n_slots}'
        )
