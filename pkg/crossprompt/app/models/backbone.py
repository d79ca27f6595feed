import collections
import dataclasses
import logging
import math
from typing import Optional

import numpy as np
from django.conf import settings

from crossprompt.app.common.checksums import crc64
from crossprompt.app.constants import CLS_TOKEN_ID
from crossprompt.app.exceptions import (
    CapacityError,
    ConfigurationError,
    DimensionError,
    IntegrityError,
    RangeError,
)
from crossprompt.app.tensor import Tensor, ops

from . import snapshots

log = logging.getLogger(__name__)

__all__ = (
    'BackboneConfig',
    'ParameterSpec',
    'EncoderStack',
    'ClassificationHead',
    'embed',
    'inject_prompt',
    'forward',
)


ParameterSpec = collections.namedtuple('ParameterSpec', ['name', 'shape', 'trainable'])


@dataclasses.dataclass(frozen=True)
class BackboneConfig:
    """
    Shape of the transformer encoder and its classification head.

    Fields:
        d_model: Hidden size d.
        n_layers: Number of pre-norm encoder layers.
        n_heads: Attention heads per layer; must divide d_model.
        d_ffn: Inner width of the feed-forward block.
        vocab_size: Rows of the token embedding table (ids 0 and 1 are PAD and CLS).
        max_positions: Rows of the position table; bounds 1 + L + T.
        n_classes: Number of output classes K.
        total_params_override: Optional reference model size used as the
            denominator of the trainable fraction.
    """

    d_model: int
    n_layers: int
    n_heads: int
    d_ffn: int
    vocab_size: int
    max_positions: int
    n_classes: int
    total_params_override: Optional[int] = None
    layer_norm_eps: float = 1e-5

    def __post_init__(self):
        for field in ('d_model', 'n_layers', 'n_heads', 'd_ffn', 'vocab_size',
                      'max_positions', 'n_classes'):
            if getattr(self, field) <= 0:
                raise ConfigurationError(f'{field} must be positive, got {getattr(self, field)}')
        if self.d_model % self.n_heads:
            raise ConfigurationError(
                f'd_model {self.d_model} is not divisible by n_heads {self.n_heads}'
            )
        if self.total_params_override is not None and self.total_params_override <= 0:
            raise ConfigurationError('total_params_override must be positive')

    @property
    def head_dim(self):
        return self.d_model // self.n_heads

    def check_capacity(self, prompt_length, text_length):
        needed = 1 + prompt_length + text_length
        if needed > self.max_positions:
            raise CapacityError(
                f'sequence of 1 + {prompt_length} + {text_length} = {needed} positions '
                f'exceeds max_positions {self.max_positions}'
            )

    def as_dict(self):
        return dataclasses.asdict(self)


def stack_parameter_shapes(config):
    d = config.d_model
    shapes = [
        ('embeddings.token', (config.vocab_size, d)),
        ('embeddings.position', (config.max_positions, d)),
    ]
    for index in range(config.n_layers):
        prefix = f'layers.{index}'
        for proj in ('query', 'key', 'value', 'output'):
            shapes.append((f'{prefix}.attention.{proj}.weight', (d, d)))
            shapes.append((f'{prefix}.attention.{proj}.bias', (d,)))
        shapes += [
            (f'{prefix}.ffn.inner.weight', (d, config.d_ffn)),
            (f'{prefix}.ffn.inner.bias', (config.d_ffn,)),
            (f'{prefix}.ffn.outer.weight', (config.d_ffn, d)),
            (f'{prefix}.ffn.outer.bias', (d,)),
            (f'{prefix}.attention_norm.gain', (d,)),
            (f'{prefix}.attention_norm.bias', (d,)),
            (f'{prefix}.ffn_norm.gain', (d,)),
            (f'{prefix}.ffn_norm.bias', (d,)),
        ]
    shapes += [('final_norm.gain', (d,)), ('final_norm.bias', (d,))]
    return shapes


def head_parameter_shapes(config):
    d, k = config.d_model, config.n_classes
    return [
        ('head.proj.weight', (d, d)),
        ('head.proj.bias', (d,)),
        ('head.out.weight', (d, k)),
        ('head.out.bias', (k,)),
    ]


def _init_array(name, shape, rng, std):
    if name.endswith('.gain'):
        return np.ones(shape, dtype=np.float32)
    if name.endswith('.bias'):
        return np.zeros(shape, dtype=np.float32)
    return rng.normal(shape, std)


class EncoderStack:
    """Token/position tables, pre-norm encoder layers and the final norm."""

    def __init__(self, config, tensors, frozen=False):
        self.config = config
        self.tensors = collections.OrderedDict(tensors)
        self.frozen = False
        if frozen:
            self.freeze()

    @classmethod
    def initialize(cls, config, rng, std=None):
        std = settings.WEIGHT_INIT_STD if std is None else std
        tensors = collections.OrderedDict(
            (name, Tensor(_init_array(name, shape, rng, std), trainable=True, name=name))
            for name, shape in stack_parameter_shapes(config)
        )
        return cls(config, tensors)

    def __getitem__(self, name):
        return self.tensors[name]

    def named_parameters(self):
        return list(self.tensors.items())

    def named_shapes(self):
        return [
            ParameterSpec(name, tensor.shape, tensor.trainable)
            for name, tensor in self.tensors.items()
        ]

    def layer(self, index):
        prefix = f'layers.{index}.'
        return {
            name[len(prefix):]: tensor
            for name, tensor in self.tensors.items() if name.startswith(prefix)
        }

    def freeze(self):
        for tensor in self.tensors.values():
            tensor.freeze()
        self.frozen = True

    def unfreeze(self):
        for tensor in self.tensors.values():
            tensor.trainable = True
        self.frozen = False

    def arrays(self):
        return collections.OrderedDict(
            (name, tensor.values) for name, tensor in self.tensors.items()
        )

    def checksum(self):
        """CRC-64 over the weight container serialization of every tensor."""
        return crc64(snapshots.serialize(self.arrays()))

    def save(self, path, metadata=None):
        metadata = dict(metadata or {})
        metadata.setdefault('checksum', self.checksum())
        metadata.setdefault('config', snapshots.encode_json(self.config.as_dict()))
        snapshots.save_weights(self.arrays(), path, metadata)
        return metadata['checksum']

    @classmethod
    def load(cls, path, config=None):
        arrays, metadata = snapshots.load_weights(path)
        if config is None:
            config = BackboneConfig(**snapshots.decode_json(metadata['config']))
        names = [name for name, _ in stack_parameter_shapes(config)]
        missing = [name for name in names if name not in arrays]
        if missing:
            raise ConfigurationError(f'{path}: snapshot lacks tensors {missing[:3]}')
        tensors = collections.OrderedDict(
            (name, Tensor(arrays[name], name=name)) for name in names
        )
        stack = cls(config, tensors, frozen=True)
        recorded = metadata.get('checksum')
        if recorded is not None and recorded != stack.checksum():
            raise IntegrityError(f'{path}: backbone checksum mismatch')
        return stack


class ClassificationHead:
    """``d → d (tanh) → K`` head applied to the pooled CLS state; always trainable."""

    def __init__(self, config, tensors):
        self.config = config
        self.tensors = collections.OrderedDict(tensors)
        if self.tensors['head.out.weight'].shape[1] != config.n_classes:
            raise DimensionError('head output width does not match n_classes')

    @classmethod
    def initialize(cls, config, rng, std=None):
        std = settings.WEIGHT_INIT_STD if std is None else std
        tensors = collections.OrderedDict(
            (name, Tensor(_init_array(name, shape, rng, std), trainable=True, name=name))
            for name, shape in head_parameter_shapes(config)
        )
        return cls(config, tensors)

    def reinitialize(self, rng, std=None):
        fresh = ClassificationHead.initialize(self.config, rng, std)
        for name, tensor in self.tensors.items():
            tensor.values = fresh.tensors[name].values
            tensor.grad = None
            tensor.trainable = True

    def named_parameters(self):
        return list(self.tensors.items())

    def named_shapes(self):
        return [
            ParameterSpec(name, tensor.shape, tensor.trainable)
            for name, tensor in self.tensors.items()
        ]

    def __call__(self, pooled):
        t = self.tensors
        hidden = ops.tanh(ops.matmul(pooled, t['head.proj.weight']) + t['head.proj.bias'])
        return ops.matmul(hidden, t['head.out.weight']) + t['head.out.bias']


def embed(stack, tokens):
    """Token embeddings only; positions are added over the injected sequence."""
    tokens = np.asarray(tokens, dtype=np.int64)
    if tokens.ndim != 2:
        raise DimensionError(f'tokens must be B×T, got shape {tokens.shape}')
    vocab_size = stack.config.vocab_size
    if tokens.size and (tokens.min() < 0 or tokens.max() >= vocab_size):
        raise RangeError(f'token id out of range [0, {vocab_size})')
    return ops.take_rows(stack['embeddings.token'], tokens)


def inject_prompt(stack, prompt, token_embeds, mask):
    """
    Build ``[CLS] ∥ prompt ∥ tokens`` for every batch row.

    Returns the combined sequence (B×(1+L+T)×d) and the extended mask; the
    prompt rows appear verbatim at positions 1..L. Position embeddings over
    0..L+T are added by ``forward``.
    """
    config = stack.config
    d = config.d_model
    batch, length = token_embeds.shape[0], token_embeds.shape[1]
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (batch, length):
        raise DimensionError(f'mask shape {mask.shape} does not match tokens {(batch, length)}')
    if prompt is None:
        prompt_length = 0
    else:
        if prompt.ndim != 2 or prompt.shape[1] != d:
            raise DimensionError(f'prompt width {prompt.shape} does not match d_model {d}')
        prompt_length = prompt.shape[0]
    config.check_capacity(prompt_length, length)

    cls_row = ops.take_rows(stack['embeddings.token'], np.full((batch, 1), CLS_TOKEN_ID))
    pieces = [cls_row]
    if prompt_length:
        pieces.append(ops.broadcast_to(prompt, (batch, prompt_length, d)))
    pieces.append(token_embeds)
    sequence = ops.concat(pieces, axis=1)
    extended = np.concatenate(
        [np.ones((batch, 1 + prompt_length), dtype=bool), mask], axis=1
    )
    return sequence, extended


def _attention(x, params, mask_add, n_heads):
    batch, length, d = x.shape
    head_dim = d // n_heads

    def heads(name):
        proj = ops.matmul(x, params[f'attention.{name}.weight']) + params[f'attention.{name}.bias']
        return ops.transpose(ops.reshape(proj, (batch, length, n_heads, head_dim)), (0, 2, 1, 3))

    query, key, value = heads('query'), heads('key'), heads('value')
    scores = ops.matmul(query, ops.transpose(key, (0, 1, 3, 2)))
    scores = ops.scale(scores, 1.0 / math.sqrt(head_dim))
    weights = ops.softmax_rows(scores + mask_add)
    context = ops.matmul(weights, value)
    context = ops.reshape(ops.transpose(context, (0, 2, 1, 3)), (batch, length, d))
    return ops.matmul(context, params['attention.output.weight']) + params['attention.output.bias']


def forward(config, stack, head, sequence, mask):
    """Pre-norm encoder over an injected sequence, pooled at CLS (index 0)."""
    batch, length, d = sequence.shape
    if d != config.d_model:
        raise DimensionError(f'sequence width {d} does not match d_model {config.d_model}')
    if length > config.max_positions:
        raise CapacityError(f'{length} positions exceed max_positions {config.max_positions}')
    mask = np.asarray(mask, dtype=bool)
    positions = ops.take_rows(stack['embeddings.position'], np.arange(length))
    x = sequence + positions
    mask_add = Tensor.wrap(
        np.where(mask, 0.0, settings.PADDING_MASK_VALUE).reshape(batch, 1, 1, length)
    )
    eps = config.layer_norm_eps
    for index in range(config.n_layers):
        params = stack.layer(index)
        normed = ops.layer_norm(
            x, params['attention_norm.gain'], params['attention_norm.bias'], eps
        )
        x = x + _attention(normed, params, mask_add, config.n_heads)
        normed = ops.layer_norm(x, params['ffn_norm.gain'], params['ffn_norm.bias'], eps)
        inner = ops.gelu(ops.matmul(normed, params['ffn.inner.weight']) + params['ffn.inner.bias'])
        x = x + ops.matmul(inner, params['ffn.outer.weight']) + params['ffn.outer.bias']
    x = ops.layer_norm(x, stack['final_norm.gain'], stack['final_norm.bias'], eps)
    pooled = ops.getitem(x, (slice(None), 0))
    return head(pooled)
