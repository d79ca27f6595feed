from .adafactor import (
    AdafactorConfig,
    AdafactorState,
    adafactor_step,
    init_states,
)
from .early_stopping import (
    EarlyStopDecision,
    EarlyStopPolicy,
    early_stop_update,
)
from .groups import (
    ParamGroup,
    build_param_groups,
)
from .plans import (
    PhasePlan,
)
from .schedules import (
    CosineRestartSchedule,
    lr_at,
)

__all__ = (
    'AdafactorConfig',
    'AdafactorState',
    'adafactor_step',
    'init_states',
    'EarlyStopDecision',
    'EarlyStopPolicy',
    'early_stop_update',
    'ParamGroup',
    'build_param_groups',
    'PhasePlan',
    'CosineRestartSchedule',
    'lr_at',
)
