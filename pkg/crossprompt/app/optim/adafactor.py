"""Adafactor with externally scheduled learning rates.

The relative-step and parameter-scale options are off: each group's
learning rate comes from its schedule. Tensors with two or more axes keep
factored row and column second moments over their last two axes; vectors
and scalars keep a full accumulator.
"""
import dataclasses
import logging
from typing import Optional

import numpy as np
from django.conf import settings

from crossprompt.app.exceptions import ContractError, NonFiniteError

log = logging.getLogger(__name__)

__all__ = (
    'AdafactorConfig',
    'AdafactorState',
    'init_states',
    'adafactor_step',
)


@dataclasses.dataclass(frozen=True)
class AdafactorConfig:
    eps: tuple = (1e-30, 1e-3)
    clip_threshold: float = 1.0
    decay_rate: float = -0.8

    @classmethod
    def from_settings(cls):
        return cls(
            eps=tuple(settings.ADAFACTOR_EPS),
            clip_threshold=settings.ADAFACTOR_CLIP_THRESHOLD,
            decay_rate=settings.ADAFACTOR_DECAY_RATE,
        )

    def as_dict(self):
        return {
            'adafactor_eps1': self.eps[0],
            'adafactor_eps2': self.eps[1],
            'adafactor_clip_threshold': self.clip_threshold,
            'adafactor_decay_rate': self.decay_rate,
        }


@dataclasses.dataclass
class AdafactorState:
    """
    Second-moment accumulators of one tensor.

    Fields:
        step: Number of updates applied so far.
        row: Row accumulator (``shape[:-1]``) for factored tensors.
        col: Column accumulator (``shape[:-2] + shape[-1:]``) for factored tensors.
        full: Elementwise accumulator for tensors with fewer than two axes.
    """

    step: int = 0
    row: Optional[np.ndarray] = None
    col: Optional[np.ndarray] = None
    full: Optional[np.ndarray] = None

    @classmethod
    def for_shape(cls, shape):
        if len(shape) >= 2:
            return cls(
                row=np.zeros(shape[:-1], dtype=np.float64),
                col=np.zeros(shape[:-2] + shape[-1:], dtype=np.float64),
            )
        return cls(full=np.zeros(shape, dtype=np.float64))

    @property
    def factored(self):
        return self.full is None


def init_states(groups):
    return {
        id(tensor): AdafactorState.for_shape(tensor.shape)
        for group in groups for tensor in group.tensors
    }


def _rms(array):
    return float(np.sqrt(np.mean(np.square(array)))) if array.size else 0.0


def _direction(grad, state, beta2t, eps1):
    squared = grad * grad + eps1
    if state.factored:
        state.row *= beta2t
        state.row += (1.0 - beta2t) * squared.mean(axis=-1)
        state.col *= beta2t
        state.col += (1.0 - beta2t) * squared.mean(axis=-2)
        row_factor = 1.0 / np.sqrt(state.row / state.row.mean(axis=-1, keepdims=True))
        col_factor = 1.0 / np.sqrt(state.col)
        return grad * row_factor[..., :, None] * col_factor[..., None, :]
    state.full *= beta2t
    state.full += (1.0 - beta2t) * squared
    return grad / np.sqrt(state.full)


def _group_lr(group, lr_scale):
    if lr_scale is None:
        return group.lr
    if isinstance(lr_scale, dict):
        return float(lr_scale[group.name])
    return group.lr * float(lr_scale)


def adafactor_step(groups, states, grads=None, lr_scale=None, config=None):
    """
    Apply one update to every tensor of every group.

    Args:
        groups: ``ParamGroup`` list.
        states: Mapping from ``id(tensor)`` to ``AdafactorState`` (see ``init_states``).
        grads: Optional mapping from ``id(tensor)`` to gradient; defaults to ``tensor.grad``.
        lr_scale: ``None`` for the group base rates, a mapping from group name
            to the scheduled rate, or a float multiplier of the base rates.
        config: ``AdafactorConfig``; defaults to the settings.

    After the update each parameter is decayed as ``p ← p·(1 − lr·wd)``.
    """
    config = config or AdafactorConfig.from_settings()
    eps1 = config.eps[0]
    for group in groups:
        lr = _group_lr(group, lr_scale)
        for tensor in group.tensors:
            grad = grads.get(id(tensor)) if grads is not None else tensor.grad
            if grad is None:
                raise ContractError(f'no gradient for {tensor.name} in group {group.name}')
            grad = np.asarray(grad, dtype=np.float64)
            if not np.isfinite(grad).all():
                bad = int(np.size(grad) - np.isfinite(grad).sum())
                raise NonFiniteError(
                    f'{bad} non-finite gradient entries in {tensor.name} {tensor.shape} '
                    f'(group {group.name})'
                )
            state = states[id(tensor)]
            state.step += 1
            beta2t = 1.0 - state.step ** config.decay_rate
            update = _direction(grad, state, beta2t, eps1)
            update /= max(1.0, _rms(update) / config.clip_threshold)
            values = tensor.values.astype(np.float64)
            values -= lr * update
            if group.weight_decay:
                values *= 1.0 - lr * group.weight_decay
            tensor.values = values.astype(tensor.values.dtype)
