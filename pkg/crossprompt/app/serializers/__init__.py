from .config import (
    BackboneConfigSerializer,
    ExperimentConfigSerializer,
    PhasePlanSerializer,
    SweepSerializer,
    load_experiment_config,
)
from .results import (
    RunResultSerializer,
    read_run_results,
    write_run_result,
)

__all__ = (
    'BackboneConfigSerializer',
    'ExperimentConfigSerializer',
    'PhasePlanSerializer',
    'SweepSerializer',
    'load_experiment_config',
    'RunResultSerializer',
    'read_run_results',
    'write_run_result',
)
