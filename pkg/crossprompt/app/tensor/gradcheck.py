import logging

import numpy as np

from crossprompt.app.exceptions import NonFiniteError

from .core import Tape, backward, precision
from .rng import SeededRng

log = logging.getLogger(__name__)

RECOMMENDED_EPS = (1e-4, 1e-2)


def finite_diff_check(loss_fn, params, eps=1e-3, *, samples_per_param=8, rng=None,
                      dtype=np.float64):
    """
    Compare reverse-mode gradients against central differences.

    ``loss_fn`` is a zero-argument callable returning a scalar Tensor built
    from ``params``. Both the reverse pass and the difference quotients run in
    ``dtype`` (float64 by default) so storage roundoff does not hide formula
    errors; pass ``dtype=np.float32`` to see what 32-bit storage does to the
    estimate. Steps much smaller than 1e-4 are dominated by roundoff.

    Returns the maximum over sampled coordinates of
    ``|g_ad − g_fd| / max(|g_ad|, |g_fd|, 1e-8)``.
    """
    low, high = RECOMMENDED_EPS
    if not low <= eps <= high:
        log.warning('finite difference step %g is outside [%g, %g]; '
                    'expect a degraded estimate', eps, low, high)
    rng = rng or SeededRng(0)
    params = list(params)
    saved = [(p.values, p.grad, p.trainable) for p in params]
    worst = 0.0
    try:
        with precision(dtype):
            for p in params:
                p.values = p.values.astype(dtype)
                p.grad = None
                p.trainable = True

            with Tape() as tape:
                loss = loss_fn()
            _check_finite(loss)
            backward(loss, tape)
            analytic = [
                np.zeros(p.shape, dtype=np.float64) if p.grad is None
                else p.grad.astype(np.float64)
                for p in params
            ]

            for p, g_ad in zip(params, analytic):
                if p.size == 0:
                    continue
                flat = p.values.reshape(-1)
                count = min(samples_per_param, p.size)
                for index in rng.choice(p.size, size=count, replace=False):
                    original = flat[index]
                    flat[index] = original + eps
                    plus = _value(loss_fn())
                    flat[index] = original - eps
                    minus = _value(loss_fn())
                    flat[index] = original
                    g_fd = (plus - minus) / (2.0 * eps)
                    g = g_ad.reshape(-1)[index]
                    error = abs(g - g_fd) / max(abs(g), abs(g_fd), 1e-8)
                    if error > worst:
                        worst = error
                        log.debug('gradcheck %s[%d]: ad=%g fd=%g rel=%g',
                                  p.name, index, g, g_fd, error)
    finally:
        for p, (values, grad, trainable) in zip(params, saved):
            p.values, p.grad, p.trainable = values, grad, trainable
    return float(worst)


def _value(loss):
    _check_finite(loss)
    return float(np.asarray(loss.values, dtype=np.float64).reshape(-1)[0])


def _check_finite(loss):
    if not np.all(np.isfinite(loss.values)):
        raise NonFiniteError(f'loss is not finite: {loss.values!r}')
