import copy
import logging

import numpy as np

from crossprompt.app.exceptions import CompatibilityError, ConfigurationError

from . import snapshots
from .accounting import count_parameters
from .backbone import ClassificationHead, embed, forward, inject_prompt
from .cache import CachedPrompt
from .prompts import PromptComponents, parse_method_label

log = logging.getLogger(__name__)

__all__ = ('PromptedClassifier', 'load_state')


class PromptedClassifier:
    """
    Frozen encoder stack, trainable head and the prompt components of one run.

    The stack is shared between clones; only the head and the prompt
    components are copied.
    """

    def __init__(self, config, stack, head, components=None):
        self.config = config
        self.stack = stack
        self.head = head
        self.components = components

    @property
    def label(self):
        return self.components.label if self.components is not None else 'none'

    def trainable_tensors(self):
        tensors = []
        if self.components is not None:
            tensors += [tensor for _, tensor in self.components.named_parameters()]
        tensors += [tensor for _, tensor in self.head.named_parameters()]
        return [tensor for tensor in tensors if tensor.trainable]

    def accounting(self):
        return count_parameters(self.stack, self.head, self.components)

    def resolve_prompt(self, prompt=None):
        """
        The prompt tensor to inject.

        ``prompt`` may be a ``CachedPrompt``, a tensor, or ``None`` for the
        live assembly of the prompt components.
        """
        if isinstance(prompt, CachedPrompt):
            prompt.check_width(self.config.d_model)
            return prompt.as_tensor()
        if prompt is not None:
            if prompt.shape[-1] != self.config.d_model:
                raise CompatibilityError(
                    f'prompt width {prompt.shape[-1]} does not match d_model {self.config.d_model}'
                )
            return prompt
        if self.components is None:
            return None
        return self.components.assemble()

    def logits(self, tokens, mask, prompt=None):
        token_embeds = embed(self.stack, tokens)
        sequence, extended = inject_prompt(
            self.stack, self.resolve_prompt(prompt), token_embeds, mask
        )
        return forward(self.config, self.stack, self.head, sequence, extended)

    def predict(self, tokens, mask, prompt=None):
        """Argmax class per row; ties go to the lowest class index."""
        return np.argmax(self.logits(tokens, mask, prompt).values, axis=-1)

    def clone(self):
        head = copy.deepcopy(self.head)
        components = self.components.clone() if self.components is not None else None
        return PromptedClassifier(self.config, self.stack, head, components)

    def state_arrays(self):
        arrays = dict(self.components.arrays()) if self.components is not None else {}
        arrays.update(
            (name, tensor.values.copy()) for name, tensor in self.head.named_parameters()
        )
        return arrays

    def load_state_arrays(self, arrays):
        if self.components is not None:
            self.components.load_arrays(arrays)
        for name, tensor in self.head.named_parameters():
            tensor.values = np.array(arrays[name], dtype=tensor.values.dtype)
            tensor.grad = None

    def save_state(self, path, metadata=None):
        """Snapshot the trainable state (prompt components and head)."""
        metadata = dict(metadata or {})
        metadata.update(
            method=self.label,
            prompt_length=self.components.budget.total,
            bottleneck=self.components.encoder.bottleneck if self.components.encoder else 0,
            backbone_checksum=self.stack.checksum(),
        )
        snapshots.save_weights(self.state_arrays(), path, metadata)
        return metadata


def load_state(path, config, stack, rng):
    """Rebuild a ``PromptedClassifier`` from a state written by ``save_state``."""
    arrays, metadata = snapshots.load_weights(path)
    if metadata.get('backbone_checksum') != stack.checksum():
        raise CompatibilityError(f'{path}: state was trained against a different backbone')
    try:
        method, fraction = parse_method_label(metadata['method'])
        components = PromptComponents.build(
            method,
            fraction,
            int(metadata['prompt_length']),
            config.d_model,
            int(metadata['bottleneck']) or 1,
            rng,
        )
    except KeyError as exc:
        raise ConfigurationError(f'{path}: state metadata lacks {exc}')
    head = ClassificationHead.initialize(config, rng)
    model = PromptedClassifier(config, stack, head, components)
    model.load_state_arrays(arrays)
    return model, metadata
