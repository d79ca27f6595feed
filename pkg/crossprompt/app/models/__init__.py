from .accounting import (
    ParameterAccounting,
    count_parameters,
)
from .backbone import (
    BackboneConfig,
    ClassificationHead,
    EncoderStack,
    embed,
    forward,
    inject_prompt,
)
from .cache import (
    CachedPrompt,
    export_cached_prompt,
    load_cached_prompt,
)
from .classifier import (
    PromptedClassifier,
    load_state,
)
from .experiment import (
    ExperimentConfig,
    RunResult,
)
from .prompts import (
    DualBudget,
    PromptComponents,
    PromptEncoder,
    PseudoPrompt,
    StandardSoftPrompt,
    assemble_prompt,
    encode_prompt,
    encode_row,
    parse_method_label,
    split_budget,
)

__all__ = (
    'ParameterAccounting',
    'count_parameters',
    'BackboneConfig',
    'ClassificationHead',
    'EncoderStack',
    'embed',
    'forward',
    'inject_prompt',
    'CachedPrompt',
    'export_cached_prompt',
    'load_cached_prompt',
    'PromptedClassifier',
    'load_state',
    'ExperimentConfig',
    'RunResult',
    'DualBudget',
    'PromptComponents',
    'PromptEncoder',
    'PseudoPrompt',
    'StandardSoftPrompt',
    'assemble_prompt',
    'encode_prompt',
    'encode_row',
    'parse_method_label',
    'split_budget',
)
