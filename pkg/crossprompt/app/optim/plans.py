import dataclasses

from django.conf import settings

from crossprompt.app.constants import PhaseKind
from crossprompt.app.exceptions import ConfigurationError

from .early_stopping import EarlyStopPolicy
from .schedules import CosineRestartSchedule

__all__ = ('PhasePlan',)


@dataclasses.dataclass(frozen=True)
class PhasePlan:
    """
    Step budget, schedule and early stopping of one training phase.

    Fields:
        kind: Source or target phase.
        max_steps: Fixed step budget, independent of dataset size.
        batch_size: Examples per optimizer step.
        patience: Early-stopping patience in validation epochs.
        n_cycles: Cosine restarts over ``max_steps``.
        min_lr: Schedule floor.
    """

    kind: PhaseKind
    max_steps: int
    batch_size: int
    patience: int
    n_cycles: int = 2
    min_lr: float = 0.0

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ConfigurationError(f'max_steps must be positive, got {self.max_steps}')
        if self.batch_size <= 0:
            raise ConfigurationError(f'batch_size must be positive, got {self.batch_size}')
        if self.patience < 0:
            raise ConfigurationError(f'patience must be non-negative, got {self.patience}')

    @classmethod
    def source(cls, **overrides):
        values = dict(
            kind=PhaseKind.SOURCE,
            max_steps=settings.SOURCE_MAX_STEPS,
            batch_size=settings.BATCH_SIZE,
            patience=settings.SOURCE_PATIENCE,
            n_cycles=settings.SCHEDULE_CYCLES,
            min_lr=settings.SCHEDULE_MIN_LR,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def target(cls, **overrides):
        values = dict(
            kind=PhaseKind.TARGET,
            max_steps=settings.TARGET_MAX_STEPS,
            batch_size=settings.BATCH_SIZE,
            patience=settings.TARGET_PATIENCE,
            n_cycles=settings.SCHEDULE_CYCLES,
            min_lr=settings.SCHEDULE_MIN_LR,
        )
        values.update(overrides)
        return cls(**values)

    @property
    def armed_after_step(self):
        return self.max_steps // self.n_cycles

    def schedule(self, base_lr):
        return CosineRestartSchedule(
            base_lr=base_lr, total_steps=self.max_steps, n_cycles=self.n_cycles, min_lr=self.min_lr
        )

    def early_stop_policy(self):
        return EarlyStopPolicy(patience=self.patience, armed_after_step=self.armed_after_step)

    def as_dict(self):
        values = dataclasses.asdict(self)
        values['kind'] = self.kind.value
        return values
