import collections
import dataclasses
import logging
from typing import Dict, Optional

import numpy as np

from .backbone import ParameterSpec, head_parameter_shapes, stack_parameter_shapes
from .prompts import prompt_parameter_shapes

log = logging.getLogger(__name__)

__all__ = (
    'ComponentCount',
    'ParameterAccounting',
    'count_parameters',
    'count_specs',
    'reference_parameter_specs',
)

ComponentCount = collections.namedtuple('ComponentCount', ['parameters', 'trainable'])


@dataclasses.dataclass(frozen=True)
class ParameterAccounting:
    """
    Exact parameter counts of a prompted classifier.

    Fields:
        total: Model size used as the denominator of the trainable fraction.
            Equals ``enumerated_total`` unless an override is configured.
        trainable: Elements of every tensor flagged trainable.
        frozen: ``total - trainable``.
        enumerated_total: Sum of element counts over every enumerated tensor.
        per_component: Component name to ``ComponentCount``.
    """

    total: int
    trainable: int
    frozen: int
    enumerated_total: int
    per_component: Dict[str, ComponentCount]
    total_params_override: Optional[int] = None

    @property
    def trainable_fraction(self):
        return self.trainable / self.total if self.total else 0.0

    def as_rows(self):
        return [
            (name, count.parameters, count.trainable)
            for name, count in self.per_component.items()
        ]


def _component(name):
    if name.startswith('head.'):
        return 'head'
    if name.startswith('encoder.'):
        return 'encoder'
    if name.startswith('prompt.'):
        return name
    return 'backbone'


def count_specs(specs, total_params_override=None):
    per_component = collections.OrderedDict()
    trainable = enumerated = 0
    for spec in specs:
        size = int(np.prod(spec.shape, dtype=np.int64))
        enumerated += size
        component = _component(spec.name)
        params, train = per_component.get(component, ComponentCount(0, 0))
        if spec.trainable:
            trainable += size
            train += size
        per_component[component] = ComponentCount(params + size, train)
    total = total_params_override if total_params_override is not None else enumerated
    return ParameterAccounting(
        total=total,
        trainable=trainable,
        frozen=total - trainable,
        enumerated_total=enumerated,
        per_component=per_component,
        total_params_override=total_params_override,
    )


def count_parameters(stack, head, prompt_components=None):
    """Count from live objects; the trainable flag of every tensor decides its side."""
    specs = list(stack.named_shapes()) + list(head.named_shapes())
    if prompt_components is not None:
        specs += prompt_components.named_shapes()
    return count_specs(specs, stack.config.total_params_override)


def reference_parameter_specs(config, method, xpe_fraction, prompt_length, bottleneck):
    """
    Shapes of a frozen-backbone run without allocating any weights.

    Lets large reference shapes be accounted for on a desk machine.
    """
    specs = [ParameterSpec(name, shape, False) for name, shape in stack_parameter_shapes(config)]
    specs += [ParameterSpec(name, shape, True) for name, shape in head_parameter_shapes(config)]
    specs += [
        ParameterSpec(name, shape, True)
        for name, shape in prompt_parameter_shapes(
            method, xpe_fraction, prompt_length, config.d_model, bottleneck
        )
    ]
    return specs
