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
Relaxed adversarial optimization of a pulse train.

The binary activity E_eff is relaxed to relax(omega) = (tanh(omega) + 1) / 2.
Adam minimizes, averaged over sampled slot shifts of the pulse train,

    sparsity(relax(omega)) - alpha * cross_entropy(compose(x, delta(omega)), label)

after which relax(omega) is binarized and pulses are greedily pruned.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from rolling_dazzle.attack.adam import Adam
from rolling_dazzle.camera_timing import frame_rate_hz, slot_count
from rolling_dazzle.classifier.model import cross_entropy_loss
from rolling_dazzle.constants import OMEGA_INIT, OMEGA_JITTER, SPARSITY_MODES
from rolling_dazzle.dazzle_synthesis import (
    PulseTrain,
    compose,
    coverage_matrix,
    pattern_from_rows,
    train_pattern,
)
from rolling_dazzle.errors import DazzleDomainError
from rolling_dazzle.photopic import duty_cycle_of_train
from rolling_dazzle.util import format_series, make_generator

LOGGER = logging.getLogger(__name__)


class AttackError(DazzleDomainError):
    """An attack was configured or called with invalid inputs."""


@dataclass(frozen=True)
class RelaxedPulseVector:
    """The continuous decision variable omega, one entry per pulse slot."""
    omega: tuple

    def __post_init__(self):
        omega = tuple(float(v) for v in self.omega)
        if not omega:
            raise AttackError('A relaxed pulse vector needs at least one entry')
        if not np.all(np.isfinite(omega)):
            raise AttackError('Relaxed pulse vector entries must be finite')
        object.__setattr__(self, 'omega', omega)

    def as_array(self):
        return np.asarray(self.omega, dtype=float)

    def activations(self):
        """numpy.ndarray: relax applied to every entry."""
        return relax(self.as_array())


@dataclass(frozen=True)
class AttackConfig:
    """Settings of one attack.

    Attributes:
        alpha (float): weight of the classifier loss against sparsity.
        learning_rate (float): Adam step size on omega.
        iterations (int): Adam steps.
        eot_samples (int): slot shifts drawn per step, with replacement.
        binarize_threshold (float): activation level at which a slot keeps its pulse.
        seed (int): seed of the initialization and shift sampling streams.
        sparsity_mode (str): 'sum' of activations, or their 'mean'.
        max_pulses (int): pulse budget enforced by pruning, or None.
        failure_loss (float): mean EoT loss above which the classifier fails;
            voluntary pruning never goes below it.
        pulse_width_us (float): physical width of every pulse.
        strength (float): perturbation scale passed to compose.
    """
    alpha: float = 1.0
    learning_rate: float = 0.05
    iterations: int = 300
    eot_samples: int = 16
    binarize_threshold: float = 0.5
    seed: int = 0
    sparsity_mode: str = 'sum'
    max_pulses: int = 4
    failure_loss: float = 2.0
    pulse_width_us: float = 15.0
    strength: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise AttackError(f'alpha must not be negative, got {self.alpha}')
        if not self.learning_rate > 0:
            raise AttackError(f'learning_rate must be positive, got {self.learning_rate}')
        if self.iterations < 1:
            raise AttackError(f'iterations must be at least 1, got {self.iterations}')
        if self.eot_samples < 1:
            raise AttackError(f'eot_samples must be at least 1, got {self.eot_samples}')
        if not 0 < self.binarize_threshold < 1:
            raise AttackError(f'binarize_threshold must lie in (0, 1), got {self.binarize_threshold}')
        if self.sparsity_mode not in SPARSITY_MODES:
            raise AttackError(f'sparsity_mode must be one of {SPARSITY_MODES}, got {self.sparsity_mode!r}')
        if self.max_pulses is not None and self.max_pulses < 0:
            raise AttackError(f'max_pulses must not be negative, got {self.max_pulses}')
        if self.pulse_width_us < 0:
            raise AttackError(f'pulse_width_us must not be negative, got {self.pulse_width_us}')
        if not 0 <= self.strength <= 1:
            raise AttackError(f'strength must lie in [0, 1], got {self.strength}')


@dataclass(frozen=True)
class AttackResult:
    """Outcome of optimize().

    Attributes:
        train (PulseTrain): the final binary pulse train.
        trace (tuple of float): relaxed objective before every Adam step.
        shift_success (tuple of bool): misclassification at every slot shift.
        loss (float): mean cross-entropy over all slot shifts of the final train.
        duty_cycle (float): duty cycle of the final train.
        relaxed (RelaxedPulseVector): omega after the last Adam step.
    """
    train: PulseTrain
    trace: tuple
    shift_success: tuple
    loss: float
    duty_cycle: float
    relaxed: RelaxedPulseVector = field(default=None)

    @property
    def success_rate(self):
        """float: fraction of slot shifts at which the image is misclassified."""
        if not self.shift_success:
            return 0.0
        return sum(self.shift_success) / len(self.shift_success)

    @property
    def success(self):
        """bool: a non-empty train misclassifies at least half of the shifts."""
        return self.train.pulse_count > 0 and self.success_rate >= 0.5

    def as_dict(self):
        """dict: the result in run-manifest form."""
        return {
            'pulse_slots': self.train.slots,
            'width_us': float(self.train.width_us),
            'pulse_count': self.train.pulse_count,
            'duty_cycle': float(self.duty_cycle),
            'loss': float(self.loss),
            'success': self.success,
            'success_rate': float(self.success_rate),
            'shift_success': [bool(v) for v in self.shift_success],
            'loss_trace': format_series(self.trace),
        }


def relax(omega):
    """Return (tanh(omega) + 1) / 2, elementwise."""
    return 0.5 * (np.tanh(omega) + 1.0)


def relax_derivative(omega):
    """Return the derivative of relax, (1 - tanh(omega)^2) / 2."""
    return 0.5 * (1.0 - np.tanh(omega) ** 2)


def relaxed_pattern(omega, r_n, m, n_rows_visible):
    """Return the continuous dazzle pattern of a relaxed pulse vector."""
    if isinstance(omega, RelaxedPulseVector):
        omega = omega.as_array()
    e_r = np.kron(relax(np.asarray(omega, dtype=float)), np.ones(int(r_n)))
    return pattern_from_rows(e_r, m, n_rows_visible)


def sparsity_surrogate(activations, mode='sum'):
    """Return the differentiable stand-in for the pulse count."""
    activations = np.asarray(activations, dtype=float)
    if mode == 'mean':
        return float(activations.sum() / len(activations))
    return float(activations.sum())


def _sparsity_scale(mode, n_slots):
    return 1.0 / n_slots if mode == 'mean' else 1.0


def binarize(omega, threshold=0.5):
    """Return the activity vector with a pulse wherever relax(omega) reaches threshold."""
    if isinstance(omega, RelaxedPulseVector):
        omega = omega.as_array()
    return tuple(int(v) for v in relax(np.asarray(omega, dtype=float)) >= threshold)


def _check_image(x, timings):
    x = np.asarray(x, dtype=float)
    if x.ndim != 3:
        raise AttackError(f'Expected an H x W x C image, got shape {x.shape}')
    if x.shape[:2] != (timings.n_rows_visible, timings.n_cols):
        raise AttackError(
            f'Image of shape {x.shape[:2]} does not match the {timings.n_rows_visible} x '
            f'{timings.n_cols} sensor'
        )
    return x


def _check_omega(omega, n_slots):
    if isinstance(omega, RelaxedPulseVector):
        omega = omega.as_array()
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (n_slots,):
        raise AttackError(f'omega has shape {omega.shape}, expected ({n_slots},)')
    return omega


def _losses(model, images, label):
    return np.asarray([cross_entropy_loss(z, label) for z in model.logits_batch(images)])


def _relaxed_terms(omega, x, label, model, timings, config, shifts, with_gradient):
    """Return the objective, its gradient over omega (or None) and the per-shift losses."""
    x = _check_image(x, timings)
    omega = _check_omega(omega, slot_count(timings))
    shifts = [int(s) for s in shifts]
    if not shifts:
        raise AttackError('The shift sample set must not be empty')
    coverage = coverage_matrix(timings, config.pulse_width_us)
    activations = relax(omega)

    images = []
    unclipped = []
    unsaturated = []
    for shift in shifts:
        covered = coverage @ np.roll(activations, shift)
        delta = np.repeat(np.minimum(1.0, covered)[:, np.newaxis], timings.n_cols, axis=1)
        images.append(compose(x, delta, config.strength))
        unclipped.append(x + config.strength * delta[:, :, np.newaxis] <= 1.0)
        unsaturated.append(covered < 1.0)
    images = np.stack(images)
    labels = [label] * len(shifts)

    sparsity = sparsity_surrogate(activations, config.sparsity_mode)
    if not with_gradient:
        losses = _losses(model, images, label)
        return float(np.mean(sparsity - config.alpha * losses)), None, losses

    losses, grads = model.loss_and_gradient_batch(images, labels)
    loss_gradient = np.zeros_like(omega)
    for shift, grad, mask, passed in zip(shifts, grads, unclipped, unsaturated):
        d_rows = config.strength * np.sum(grad * mask, axis=(1, 2)) * passed
        loss_gradient += np.roll(coverage.T @ d_rows, -shift)
    loss_gradient /= len(shifts)
    gradient = relax_derivative(omega) * (
        _sparsity_scale(config.sparsity_mode, len(omega)) - config.alpha * loss_gradient
    )
    value = float(np.mean(sparsity - config.alpha * np.asarray(losses)))
    return value, gradient, np.asarray(losses)


def objective(omega, x, label, model, timings, config, shifts):
    """Return the relaxed objective averaged over the given slot shifts."""
    value, _, _ = _relaxed_terms(omega, x, label, model, timings, config, shifts, with_gradient=False)
    return value


def chain_gradient(omega, x, label, model, timings, config, shift):
    """Return d objective / d omega at a single slot shift.

    The classifier's input gradient is summed over the unclipped pixels of
    every row, mapped back to the slots covering that row, and multiplied by
    the relax derivative.
    """
    _, gradient, _ = _relaxed_terms(omega, x, label, model, timings, config, [shift], with_gradient=True)
    return gradient


def eot_losses(train, x, label, model, timings, shifts=None, strength=1.0):
    """Return the loss and predicted label of the attacked image at every shift.

    Args:
        shifts (sequence of int): slot shifts, default every one of the N shifts.

    Returns:
        tuple: losses and predicted labels, numpy arrays in shift order.
    """
    x = _check_image(x, timings)
    if shifts is None:
        shifts = range(train.n_slots)
    images = np.stack([
        compose(x, train_pattern(train.rolled(int(shift)), timings), strength) for shift in shifts
    ])
    out = model.logits_batch(images)
    losses = np.asarray([cross_entropy_loss(z, label) for z in out])
    return losses, np.argmax(out, axis=1)


def _without(train, slot):
    activity = list(train.activity)
    activity[slot] = 0
    return PulseTrain(tuple(activity), train.width_us)


def prune(train, x, label, model, timings, config):
    """Greedily remove pulses while the attack keeps working.

    Each step removes the pulse whose removal leaves the highest mean EoT
    loss. A step is taken when the train exceeds max_pulses, or when the loss
    after it stays at or above failure_loss.
    """
    current = train
    while current.pulse_count:
        best_train, best_loss = None, None
        for slot in current.slots:
            candidate = _without(current, slot)
            losses, _ = eot_losses(candidate, x, label, model, timings, strength=config.strength)
            loss = float(np.mean(losses))
            if best_loss is None or loss > best_loss:
                best_train, best_loss = candidate, loss
        forced = config.max_pulses is not None and current.pulse_count > config.max_pulses
        if not forced and best_loss < config.failure_loss:
            break
        LOGGER.debug('Pruned to %s pulses, mean EoT loss %.4f', best_train.pulse_count, best_loss)
        current = best_train
    return current


def optimize(x, label, model, timings, config):
    """Optimize a pulse train that makes the classifier misclassify x.

    Returns:
        AttackResult: bit-identical for identical inputs and config.seed.
    """
    x = _check_image(x, timings)
    n_slots = slot_count(timings)
    init_rng = make_generator(config.seed, 'attack-init')
    shift_rng = make_generator(config.seed, 'attack-eot')
    omega = OMEGA_INIT + init_rng.uniform(-OMEGA_JITTER, OMEGA_JITTER, size=n_slots)
    optimizer = Adam(config.learning_rate)

    trace = []
    for iteration in range(config.iterations):
        shifts = shift_rng.integers(0, n_slots, size=config.eot_samples)
        value, gradient, losses = _relaxed_terms(
            omega, x, label, model, timings, config, shifts, with_gradient=True
        )
        trace.append(value)
        omega = optimizer.step({'omega': omega}, {'omega': gradient})['omega']
        LOGGER.debug('Iteration %s: objective %.6f, mean loss %.4f', iteration, value, float(np.mean(losses)))

    train = PulseTrain(binarize(omega, config.binarize_threshold), config.pulse_width_us)
    LOGGER.debug('Binarized train has %s pulses', train.pulse_count)
    train = prune(train, x, label, model, timings, config)
    losses, predicted = eot_losses(train, x, label, model, timings, strength=config.strength)
    result = AttackResult(
        train=train,
        trace=tuple(trace),
        shift_success=tuple(bool(p != label) for p in predicted),
        loss=float(np.mean(losses)),
        duty_cycle=duty_cycle_of_train(train.pulse_count, train.width_us, frame_rate_hz(timings)),
        relaxed=RelaxedPulseVector(tuple(omega)),
    )
    if not train.pulse_count:
        LOGGER.warning('Attack failed: no pulse survived binarization and pruning')
    LOGGER.info('Attack finished with %s pulses, success rate %.3f, mean loss %.4f',
                train.pulse_count, result.success_rate, result.loss)
    return result
