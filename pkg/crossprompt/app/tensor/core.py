import contextlib
import logging

import numpy as np

from crossprompt.app.exceptions import ContractError, DimensionError

log = logging.getLogger(__name__)

__all__ = (
    'Tensor',
    'Tape',
    'Record',
    'backward',
    'precision',
    'float_dtype',
)

_precision_stack = [np.float32]
_active_tapes = []


def float_dtype():
    """The dtype new tensors and primitive outputs are stored in."""
    return _precision_stack[-1]


@contextlib.contextmanager
def precision(dtype):
    """Temporarily switch tensor storage precision (used by the gradient checker)."""
    _precision_stack.append(np.dtype(dtype).type)
    try:
        yield
    finally:
        _precision_stack.pop()


class Tensor:
    """
    Shaped real-valued array with an optional gradient buffer.

    Fields:
        values: Row-major array in the active precision (float32 by default).
        grad: Gradient buffer of identical shape, present only on trainable
            leaves after a reverse pass.
        trainable: Whether reverse passes may write into ``grad``.
        name: Diagnostic label.
    """

    def __init__(self, values, *, trainable=False, name=None):
        values = np.array(values, dtype=float_dtype(), copy=True)
        if any(extent < 0 for extent in values.shape):
            raise DimensionError(f'negative extent in shape {values.shape}')
        self.values = values
        self.grad = None
        self.trainable = bool(trainable)
        self.name = name
        self.producer = None

    @classmethod
    def wrap(cls, values, name=None):
        """Wrap an array produced by a primitive without copying it."""
        tensor = cls.__new__(cls)
        tensor.values = np.asarray(values, dtype=float_dtype())
        tensor.grad = None
        tensor.trainable = False
        tensor.name = name
        tensor.producer = None
        return tensor

    @property
    def shape(self):
        return self.values.shape

    @property
    def ndim(self):
        return self.values.ndim

    @property
    def size(self):
        return self.values.size

    @property
    def is_leaf(self):
        return self.producer is None

    @property
    def requires_grad(self):
        return self.trainable or self.producer is not None

    def numpy(self):
        return self.values

    def item(self):
        return float(self.values.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def accumulate_grad(self, grad):
        if not self.trainable:
            return
        grad = np.asarray(grad, dtype=self.values.dtype)
        if grad.shape != self.values.shape:
            raise DimensionError(
                f'gradient shape {grad.shape} does not match {self.name or "tensor"} '
                f'shape {self.values.shape}'
            )
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    def freeze(self):
        self.trainable = False
        self.grad = None

    def detach(self, name=None):
        return Tensor(self.values, trainable=False, name=name or self.name)

    def __repr__(self):
        label = f' {self.name!r}' if self.name else ''
        flag = ', trainable' if self.trainable else ''
        return f'<Tensor{label} shape={self.shape}{flag}>'

    # Operators delegate to the primitives module.

    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from . import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from . import ops
        return ops.mul(other, self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from . import ops
        return ops.scale(self, -1.0)


class Record:
    """One primitive application on a tape."""

    __slots__ = ('op', 'inputs', 'output', 'vjp', 'tape')

    def __init__(self, op, inputs, output, vjp, tape):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.vjp = vjp
        self.tape = tape

    def __repr__(self):
        return f'<Record {self.op} -> {self.output.shape}>'


class Tape:
    """
    Define-by-run record of primitive applications.

    Records are appended in execution order, so the list is topologically
    ordered. Use as a context manager to make it the active tape::

        with Tape() as tape:
            loss = ops.cross_entropy(logits, labels)
        backward(loss, tape)
    """

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        _active_tapes.append(self)
        return self

    def __exit__(self, *exc_info):
        _active_tapes.remove(self)

    def ops(self):
        return [record.op for record in self.records]


def active_tape():
    return _active_tapes[-1] if _active_tapes else None


def record(op, inputs, output, vjp):
    """Attach ``output`` to the active tape when any input needs a gradient.

    ``vjp`` maps the output cotangent to a tuple of input cotangents (one per
    input, ``None`` for inputs that take no gradient).
    """
    tape = active_tape()
    if tape is None:
        return output
    if not any(isinstance(inp, Tensor) and inp.requires_grad for inp in inputs):
        return output
    entry = Record(op, tuple(inputs), output, vjp, tape)
    output.producer = entry
    tape.records.append(entry)
    return output


def backward(loss, tape):
    """
    Reverse pass over ``tape`` seeded at the scalar ``loss``.

    Gradients are accumulated into trainable leaves reachable from ``loss``;
    leaves with ``trainable=False`` are never written. Returns the list of
    leaves that received a gradient, in first-visit order.
    """
    if not isinstance(loss, Tensor) or loss.size != 1:
        shape = getattr(loss, 'shape', None)
        raise ContractError(f'backward needs a scalar loss, got shape {shape}')
    if loss.producer is None:
        if loss.trainable:
            loss.accumulate_grad(np.ones_like(loss.values))
            return [loss]
        raise ContractError('loss was not produced on the tape and has no trainable inputs')
    if loss.producer.tape is not tape:
        raise ContractError('loss was produced on a different tape')

    cotangents = {id(loss): np.ones_like(loss.values, dtype=np.float64)}
    written = {}
    for entry in reversed(tape.records):
        cotangent = cotangents.pop(id(entry.output), None)
        if cotangent is None:
            continue
        grads = entry.vjp(cotangent)
        for inp, grad in zip(entry.inputs, grads):
            if grad is None or not isinstance(inp, Tensor) or not inp.requires_grad:
                continue
            if inp.producer is None or inp.producer.tape is not tape:
                if inp.trainable:
                    inp.accumulate_grad(grad)
                    written.setdefault(id(inp), inp)
                continue
            key = id(inp)
            if key in cotangents:
                cotangents[key] = cotangents[key] + grad
            else:
                cotangents[key] = np.asarray(grad, dtype=np.float64)
    return list(written.values())
