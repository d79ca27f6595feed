from .campaigns import (
    obtain_backbone,
    run_sequential,
    run_zero_shot,
    sweep,
)
from .pretraining import (
    pretrain_and_freeze,
    pretrain_backbone,
)
from .sampling import (
    sample_multisource_batch,
)
from .training import (
    adapt_target,
    train_source,
)

__all__ = (
    'obtain_backbone',
    'run_sequential',
    'run_zero_shot',
    'sweep',
    'pretrain_and_freeze',
    'pretrain_backbone',
    'sample_multisource_batch',
    'adapt_target',
    'train_source',
)
