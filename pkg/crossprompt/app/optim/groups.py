import dataclasses
import logging
from typing import List

from django.conf import settings

from crossprompt.app.constants import ENCODER_PARAM_GROUP, PROMPT_PARAM_GROUP
from crossprompt.app.exceptions import ConfigurationError

log = logging.getLogger(__name__)

__all__ = (
    'ParamGroup',
    'build_param_groups',
    'check_partition',
)


@dataclasses.dataclass
class ParamGroup:
    """
    Tensors sharing one learning rate and weight decay.

    Fields:
        name: Group label used in logs and schedules.
        tensors: Member tensors; each trainable tensor belongs to exactly one group.
        lr: Base learning rate (the schedule's peak).
        weight_decay: Decoupled weight decay coefficient.
    """

    name: str
    tensors: List
    lr: float
    weight_decay: float

    def __len__(self):
        return len(self.tensors)


def check_partition(groups, trainable):
    seen = {}
    for group in groups:
        for tensor in group.tensors:
            if id(tensor) in seen:
                raise ConfigurationError(
                    f'{tensor.name} is in both {seen[id(tensor)]} and {group.name}'
                )
            seen[id(tensor)] = group.name
    missing = [tensor.name for tensor in trainable if id(tensor) not in seen]
    if missing:
        raise ConfigurationError(f'trainable tensors outside any group: {missing}')


def build_param_groups(model, prompt_lr=None, prompt_weight_decay=None,
                       encoder_lr=None, encoder_weight_decay=None):
    """
    Split a prompted classifier's trainable tensors into the two groups.

    The standard prompt goes to the soft-prompt group; the pseudo prompt, the
    encoder and the head go to the encoder+head group. Empty groups are
    dropped.
    """
    prompt = ParamGroup(
        PROMPT_PARAM_GROUP,
        [],
        settings.PROMPT_LR if prompt_lr is None else prompt_lr,
        settings.PROMPT_WEIGHT_DECAY if prompt_weight_decay is None else prompt_weight_decay,
    )
    encoder = ParamGroup(
        ENCODER_PARAM_GROUP,
        [],
        settings.ENCODER_LR if encoder_lr is None else encoder_lr,
        settings.ENCODER_WEIGHT_DECAY if encoder_weight_decay is None else encoder_weight_decay,
    )
    components = model.components
    if components is not None and components.std is not None:
        prompt.tensors.append(components.std.matrix)
    if components is not None and components.pseudo is not None:
        encoder.tensors.append(components.pseudo.matrix)
        encoder.tensors += [tensor for _, tensor in components.encoder.named_parameters()]
    encoder.tensors += [tensor for _, tensor in model.head.named_parameters()]

    groups = [group for group in (prompt, encoder) if group.tensors]
    check_partition(groups, model.trainable_tensors())
    for group in groups:
        log.debug('Parameter group %s: %d tensors, lr=%g, wd=%g',
                  group.name, len(group), group.lr, group.weight_decay)
    return groups
