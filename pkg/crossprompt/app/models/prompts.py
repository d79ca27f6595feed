import collections
import copy
import decimal
import logging
import re

import numpy as np
from django.conf import settings

from crossprompt.app.common import metrics
from crossprompt.app.constants import PromptMethod
from crossprompt.app.exceptions import ConfigurationError, DimensionError
from crossprompt.app.tensor import Tensor, ops

from .backbone import ParameterSpec

log = logging.getLogger(__name__)

__all__ = (
    'DualBudget',
    'StandardSoftPrompt',
    'PseudoPrompt',
    'PromptEncoder',
    'PromptComponents',
    'parse_method_label',
    'method_label',
    'split_budget',
    'encode_row',
    'encode_prompt',
    'assemble_prompt',
    'prompt_parameter_shapes',
)

METHOD_LABEL_REGEXP = re.compile(r'^(?P<method>SPT|XPE|DUAL)(?:-(?P<pct>\d{1,3}))?$', re.IGNORECASE)


def parse_method_label(label):
    """
    Parse ``SPT``, ``XPE`` or ``DUAL-<pct>`` into ``(PromptMethod, xpe_fraction)``.

    Raises ConfigurationError for anything else.
    """
    match = METHOD_LABEL_REGEXP.match(str(label).strip())
    if not match:
        raise ConfigurationError(
            f'Invalid method {label!r}. Expected SPT, XPE or DUAL-<percent>, e.g. DUAL-70'
        )
    method = PromptMethod(match.group('method').upper())
    pct = match.group('pct')
    if method is PromptMethod.DUAL:
        if pct is None:
            raise ConfigurationError(f'DUAL needs an XPE percentage, e.g. DUAL-70, got {label!r}')
        fraction = int(pct) / 100
        if fraction > 1:
            raise ConfigurationError(f'XPE percentage above 100 in {label!r}')
        return method, fraction
    if pct is not None:
        raise ConfigurationError(f'{method.value} takes no percentage, got {label!r}')
    return method, 1.0 if method is PromptMethod.XPE else 0.0


def method_label(method, xpe_fraction):
    if method is PromptMethod.DUAL:
        return f'DUAL-{int(round(xpe_fraction * 100))}'
    return method.value


def split_budget(total, xpe_fraction):
    """Return ``(n_std, n_xpe)`` with ``n_xpe = round_half_up(total · xpe_fraction)``."""
    if total <= 0:
        raise ConfigurationError(f'prompt budget must be positive, got {total}')
    if not 0 <= xpe_fraction <= 1:
        raise ConfigurationError(f'xpe_fraction must lie in [0, 1], got {xpe_fraction}')
    exact = decimal.Decimal(str(xpe_fraction)) * total
    n_xpe = int(exact.quantize(decimal.Decimal(1), rounding=decimal.ROUND_HALF_UP))
    return total - n_xpe, n_xpe


class DualBudget:
    """Fixed prompt budget L split between the standard and encoded segments."""

    def __init__(self, total, xpe_fraction):
        self.total = int(total)
        self.xpe_fraction = float(xpe_fraction)
        self.n_std, self.n_xpe = split_budget(self.total, self.xpe_fraction)

    def __repr__(self):
        return f'<DualBudget L={self.total} std={self.n_std} xpe={self.n_xpe}>'

    def __eq__(self, other):
        return (isinstance(other, DualBudget)
                and (self.total, self.xpe_fraction) == (other.total, other.xpe_fraction))


class _PromptMatrix:
    default_name = None

    def __init__(self, matrix):
        if matrix.ndim != 2:
            raise DimensionError(f'prompt matrix must be n×d, got {matrix.shape}')
        self.matrix = matrix

    @classmethod
    def initialize(cls, n_rows, d_model, rng, std=None):
        std = settings.PROMPT_INIT_STD if std is None else std
        return cls(Tensor(rng.normal((n_rows, d_model), std), trainable=True,
                          name=cls.default_name))

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def width(self):
        return self.matrix.shape[1]


class StandardSoftPrompt(_PromptMatrix):
    """n_s×d embeddings trained directly by the task loss, shared by all sources."""

    default_name = 'prompt.standard'


class PseudoPrompt(_PromptMatrix):
    """n_x×d trainable input of the prompt encoder; never fed to the backbone."""

    default_name = 'prompt.pseudo'


class PromptEncoder:
    """
    Residual bottleneck MLP applied to one embedding at a time.

    ``f(e) = e + W_up · gelu(W_down · e + b_down) + b_up``. The up projection
    starts at zero so the encoder is the identity at initialization.
    """

    def __init__(self, tensors):
        self.tensors = collections.OrderedDict(tensors)
        down = self.tensors['encoder.down.weight']
        up = self.tensors['encoder.up.weight']
        if down.shape[::-1] != up.shape:
            raise DimensionError(f'encoder projections {down.shape} and {up.shape} disagree')
        self.invocations = 0

    @classmethod
    def initialize(cls, d_model, bottleneck, rng, std=None):
        std = settings.PROMPT_INIT_STD if std is None else std
        if bottleneck <= 0:
            raise ConfigurationError(f'encoder bottleneck must be positive, got {bottleneck}')
        shapes = encoder_parameter_shapes(d_model, bottleneck)
        tensors = collections.OrderedDict()
        for name, shape in shapes:
            if name == 'encoder.down.weight':
                values = rng.normal(shape, std)
            else:
                values = np.zeros(shape, dtype=np.float32)
            tensors[name] = Tensor(values, trainable=True, name=name)
        return cls(tensors)

    @staticmethod
    def parameter_count(d_model, bottleneck):
        return d_model * bottleneck + bottleneck + bottleneck * d_model + d_model

    @property
    def d_model(self):
        return self.tensors['encoder.down.weight'].shape[0]

    @property
    def bottleneck(self):
        return self.tensors['encoder.down.weight'].shape[1]

    def named_parameters(self):
        return list(self.tensors.items())

    def apply_row(self, row):
        t = self.tensors
        hidden = ops.gelu(ops.matmul(row, t['encoder.down.weight']) + t['encoder.down.bias'])
        return row + ops.matmul(hidden, t['encoder.up.weight']) + t['encoder.up.bias']

    def __call__(self, matrix):
        """Encode every row independently and stack the results."""
        if matrix.ndim != 2 or matrix.shape[1] != self.d_model:
            raise DimensionError(
                f'encoder expects n×{self.d_model} input, got {matrix.shape}'
            )
        self.invocations += 1
        metrics.prompt_encoder_forwards.inc()
        rows = [
            self.apply_row(ops.getitem(matrix, slice(index, index + 1)))
            for index in range(matrix.shape[0])
        ]
        if not rows:
            return Tensor.wrap(np.zeros((0, self.d_model)))
        return ops.concat(rows, axis=0)


def encoder_parameter_shapes(d_model, bottleneck):
    return [
        ('encoder.down.weight', (d_model, bottleneck)),
        ('encoder.down.bias', (bottleneck,)),
        ('encoder.up.weight', (bottleneck, d_model)),
        ('encoder.up.bias', (d_model,)),
    ]


def encode_row(embedding, encoder):
    embedding = ops.as_tensor(embedding)
    if embedding.shape != (encoder.d_model,):
        raise DimensionError(
            f'embedding width {embedding.shape} does not match encoder width {encoder.d_model}'
        )
    encoder.invocations += 1
    metrics.prompt_encoder_forwards.inc()
    row = ops.reshape(embedding, (1, encoder.d_model))
    return ops.reshape(encoder.apply_row(row), (encoder.d_model,))


def encode_prompt(pseudo, encoder):
    return encoder(pseudo.matrix)


def assemble_prompt(method, std, pseudo, encoder, budget):
    """
    Final L×d soft prompt.

    SPT returns the standard prompt, XPE the encoded pseudo prompt, DUAL the
    standard rows first followed by the encoded rows.
    """
    expected_std, expected_xpe = budget.n_std, budget.n_xpe
    if method is PromptMethod.SPT and expected_xpe:
        raise ConfigurationError(f'SPT needs the whole budget on the standard prompt, got {budget}')
    if method is PromptMethod.XPE and expected_std:
        raise ConfigurationError(f'XPE needs the whole budget on the encoder, got {budget}')
    std_rows = std.rows if std is not None else 0
    pseudo_rows = pseudo.rows if pseudo is not None else 0
    if std_rows != expected_std or pseudo_rows != expected_xpe:
        raise ConfigurationError(
            f'prompt components ({std_rows} standard, {pseudo_rows} pseudo rows) '
            f'do not match {budget}'
        )
    pieces = []
    if expected_std:
        pieces.append(std.matrix)
    if expected_xpe:
        if encoder is None:
            raise ConfigurationError(f'{method.value} needs a prompt encoder')
        pieces.append(encode_prompt(pseudo, encoder))
    if len(pieces) == 1:
        return pieces[0]
    return ops.concat(pieces, axis=0)


def prompt_parameter_shapes(method, xpe_fraction, total, d_model, bottleneck):
    n_std, n_xpe = split_budget(total, xpe_fraction)
    shapes = []
    if n_std:
        shapes.append((StandardSoftPrompt.default_name, (n_std, d_model)))
    if n_xpe:
        shapes.append((PseudoPrompt.default_name, (n_xpe, d_model)))
        shapes += encoder_parameter_shapes(d_model, bottleneck)
    return shapes


class PromptComponents:
    """
    The trainable prompt parameters of one run.

    SPT holds a standard prompt, XPE a pseudo prompt and an encoder, DUAL all
    three. Segments whose budget share rounds to zero are omitted.
    """

    def __init__(self, method, budget, std=None, pseudo=None, encoder=None):
        self.method = method
        self.budget = budget
        self.std = std
        self.pseudo = pseudo
        self.encoder = encoder

    @classmethod
    def build(cls, method, xpe_fraction, total, d_model, bottleneck, rng):
        if method is PromptMethod.SPT:
            xpe_fraction = 0.0
        elif method is PromptMethod.XPE:
            xpe_fraction = 1.0
        budget = DualBudget(total, xpe_fraction)
        std = pseudo = encoder = None
        if budget.n_std:
            std = StandardSoftPrompt.initialize(budget.n_std, d_model, rng.child('standard'))
        if budget.n_xpe:
            pseudo = PseudoPrompt.initialize(budget.n_xpe, d_model, rng.child('pseudo'))
            encoder = PromptEncoder.initialize(d_model, bottleneck, rng.child('encoder'))
        return cls(method, budget, std, pseudo, encoder)

    @property
    def label(self):
        return method_label(self.method, self.budget.xpe_fraction)

    @property
    def d_model(self):
        part = self.std or self.pseudo
        return part.width

    def assemble(self):
        return assemble_prompt(self.method, self.std, self.pseudo, self.encoder, self.budget)

    def named_parameters(self):
        params = []
        if self.std is not None:
            params.append((self.std.matrix.name, self.std.matrix))
        if self.pseudo is not None:
            params.append((self.pseudo.matrix.name, self.pseudo.matrix))
        if self.encoder is not None:
            params += self.encoder.named_parameters()
        return params

    def named_shapes(self):
        return [
            ParameterSpec(name, tensor.shape, tensor.trainable)
            for name, tensor in self.named_parameters()
        ]

    def arrays(self):
        return collections.OrderedDict(
            (name, tensor.values.copy()) for name, tensor in self.named_parameters()
        )

    def load_arrays(self, arrays):
        for name, tensor in self.named_parameters():
            if arrays[name].shape != tensor.shape:
                raise DimensionError(
                    f'{name}: stored shape {arrays[name].shape} does not match {tensor.shape}'
                )
            tensor.values = np.array(arrays[name], dtype=tensor.values.dtype)
            tensor.grad = None

    def clone(self):
        return copy.deepcopy(self)
