"""Differentiable primitives.

Every primitive computes in float64 and stores its output in the active
precision. Cotangents flow through the reverse pass in float64 as well.
"""
import numpy as np
from scipy import special

from crossprompt.app.exceptions import (
    ContractError,
    DimensionError,
    NonFiniteError,
    RangeError,
)

from .core import Tensor, record

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor.wrap(np.asarray(value))


def _f64(tensor):
    return tensor.values.astype(np.float64, copy=False)


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _need(tensor):
    return isinstance(tensor, Tensor) and tensor.requires_grad


# Elementwise arithmetic
# ----------------------

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    try:
        out = Tensor.wrap(_f64(a) + _f64(b))
    except ValueError:
        raise DimensionError(f'cannot broadcast {a.shape} + {b.shape}')

    def vjp(g):
        return (
            _unbroadcast(g, a.shape) if _need(a) else None,
            _unbroadcast(g, b.shape) if _need(b) else None,
        )

    return record('add', (a, b), out, vjp)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    try:
        out = Tensor.wrap(_f64(a) - _f64(b))
    except ValueError:
        raise DimensionError(f'cannot broadcast {a.shape} - {b.shape}')

    def vjp(g):
        return (
            _unbroadcast(g, a.shape) if _need(a) else None,
            _unbroadcast(-g, b.shape) if _need(b) else None,
        )

    return record('sub', (a, b), out, vjp)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    av, bv = _f64(a), _f64(b)
    try:
        out = Tensor.wrap(av * bv)
    except ValueError:
        raise DimensionError(f'cannot broadcast {a.shape} * {b.shape}')

    def vjp(g):
        return (
            _unbroadcast(g * bv, a.shape) if _need(a) else None,
            _unbroadcast(g * av, b.shape) if _need(b) else None,
        )

    return record('mul', (a, b), out, vjp)


def scale(a, factor):
    a = as_tensor(a)
    factor = float(factor)
    out = Tensor.wrap(_f64(a) * factor)
    return record('scale', (a,), out, lambda g: (g * factor,))


def square(a):
    a = as_tensor(a)
    av = _f64(a)
    out = Tensor.wrap(av * av)
    return record('square', (a,), out, lambda g: (2.0 * av * g,))


def sum_all(a):
    a = as_tensor(a)
    out = Tensor.wrap(np.asarray(_f64(a).sum()))
    return record('sum', (a,), out, lambda g: (np.broadcast_to(g, a.shape).copy(),))


def mean_all(a):
    a = as_tensor(a)
    count = max(a.size, 1)
    out = Tensor.wrap(np.asarray(_f64(a).sum() / count))
    return record('mean', (a,), out, lambda g: (np.broadcast_to(g / count, a.shape).copy(),))


# Linear algebra and layout
# -------------------------

def matmul(a, b):
    """Matrix product over the last two axes, broadcasting leading axes.

    ``dA = dC·Bᵀ`` and ``dB = Aᵀ·dC``, reduced over broadcast axes.
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f'matmul shape mismatch: {a.shape} @ {b.shape}')
    av, bv = _f64(a), _f64(b)
    try:
        out = Tensor.wrap(np.matmul(av, bv))
    except ValueError:
        raise DimensionError(f'matmul shape mismatch: {a.shape} @ {b.shape}')

    def vjp(g):
        ga = gb = None
        if _need(a):
            ga = _unbroadcast(np.matmul(g, np.swapaxes(bv, -1, -2)), a.shape)
        if _need(b):
            gb = _unbroadcast(np.matmul(np.swapaxes(av, -1, -2), g), b.shape)
        return ga, gb

    return record('matmul', (a, b), out, vjp)


def reshape(a, shape):
    a = as_tensor(a)
    try:
        out = Tensor.wrap(a.values.reshape(shape))
    except ValueError:
        raise DimensionError(f'cannot reshape {a.shape} into {tuple(shape)}')
    return record('reshape', (a,), out, lambda g: (g.reshape(a.shape),))


def transpose(a, axes):
    a = as_tensor(a)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    out = Tensor.wrap(np.transpose(a.values, axes))
    return record('transpose', (a,), out, lambda g: (np.transpose(g, inverse),))


def broadcast_to(a, shape):
    a = as_tensor(a)
    try:
        out = Tensor.wrap(np.broadcast_to(a.values, shape).copy())
    except ValueError:
        raise DimensionError(f'cannot broadcast {a.shape} to {tuple(shape)}')
    return record('broadcast', (a,), out, lambda g: (_unbroadcast(g, a.shape),))


def concat(tensors, axis):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = Tensor.wrap(np.concatenate([t.values for t in tensors], axis=axis))
    except ValueError:
        shapes = [t.shape for t in tensors]
        raise DimensionError(f'cannot concatenate shapes {shapes} on axis {axis}')
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def vjp(g):
        pieces = np.split(g, bounds, axis=axis)
        return tuple(
            piece if _need(t) else None for t, piece in zip(tensors, pieces)
        )

    return record('concat', tuple(tensors), out, vjp)


def getitem(a, key):
    a = as_tensor(a)
    out = Tensor.wrap(a.values[key])

    def vjp(g):
        grad = np.zeros(a.shape, dtype=np.float64)
        np.add.at(grad, key, g)
        return (grad,)

    return record('getitem', (a,), out, vjp)


def take_rows(table, ids):
    """Gather rows of a 2-D ``table``; ids may have any shape."""
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2:
        raise DimensionError(f'row lookup needs a 2-D table, got {table.shape}')
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise RangeError(
            f'row id out of range [0, {table.shape[0]}): min {ids.min()}, max {ids.max()}'
        )
    out = Tensor.wrap(table.values[ids])

    def vjp(g):
        grad = np.zeros(table.shape, dtype=np.float64)
        np.add.at(grad, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        return (grad,)

    return record('take_rows', (table,), out, vjp)


# Nonlinearities
# --------------

def tanh(a):
    a = as_tensor(a)
    y = np.tanh(_f64(a))
    out = Tensor.wrap(y)
    return record('tanh', (a,), out, lambda g: (g * (1.0 - y * y),))


def gelu(a):
    """Exact GELU, ``x·Φ(x)`` with Φ the standard normal CDF."""
    a = as_tensor(a)
    x = _f64(a)
    cdf = special.ndtr(x)
    out = Tensor.wrap(x * cdf)

    def vjp(g):
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
        return (g * (cdf + x * pdf),)

    return record('gelu', (a,), out, vjp)


def softmax_rows(x):
    """Softmax over the last axis, computed with max subtraction."""
    x = as_tensor(x)
    xv = _f64(x)
    if np.isnan(xv).any():
        raise NonFiniteError(f'NaN entering softmax of {x.name or "tensor"} {x.shape}')
    shifted = xv - xv.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)
    out = Tensor.wrap(y)

    def vjp(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return record('softmax', (x,), out, vjp)


def layer_norm(x, gain, bias, eps):
    """Per-row mean-0/variance-1 normalization over the last axis, then affine."""
    if not eps > 0:
        raise ContractError(f'layer norm eps must be positive, got {eps}')
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    width = x.shape[-1]
    if gain.shape != (width,) or bias.shape != (width,):
        raise DimensionError(
            f'layer norm affine shapes {gain.shape}/{bias.shape} do not match width {width}'
        )
    xv = _f64(x)
    centered = xv - xv.mean(axis=-1, keepdims=True)
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    gv = _f64(gain)
    out = Tensor.wrap(xhat * gv + _f64(bias))

    def vjp(g):
        lead = tuple(range(g.ndim - 1))
        ggain = (g * xhat).sum(axis=lead) if _need(gain) else None
        gbias = g.sum(axis=lead) if _need(bias) else None
        gx = None
        if _need(x):
            gxhat = g * gv
            gx = inv * (
                gxhat
                - gxhat.mean(axis=-1, keepdims=True)
                - xhat * (gxhat * xhat).mean(axis=-1, keepdims=True)
            )
        return gx, ggain, gbias

    return record('layer_norm', (x, gain, bias), out, vjp)


# Loss
# ----

def cross_entropy(logits, labels):
    """Mean negative log-softmax of the true class.

    The gradient with respect to the logits is ``(softmax − one_hot) / B``.
    """
    logits = as_tensor(logits)
    if logits.ndim != 2:
        raise DimensionError(f'cross entropy needs B×K logits, got {logits.shape}')
    batch, n_classes = logits.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (batch,):
        raise DimensionError(f'labels shape {labels.shape} does not match batch {batch}')
    if batch and (labels.min() < 0 or labels.max() >= n_classes):
        raise RangeError(f'label out of range [0, {n_classes}): {labels.tolist()}')
    z = _f64(logits)
    z = z - z.max(axis=-1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    rows = np.arange(batch)
    out = Tensor.wrap(np.asarray(-log_probs[rows, labels].mean()))

    def vjp(g):
        grad = np.exp(log_probs)
        grad[rows, labels] -= 1.0
        return (grad * (g / batch),)

    return record('cross_entropy', (logits,), out, vjp)
