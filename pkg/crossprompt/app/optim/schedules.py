import dataclasses
import math

from crossprompt.app.exceptions import ConfigurationError, RangeError

__all__ = ('CosineRestartSchedule', 'lr_at')


@dataclasses.dataclass(frozen=True)
class CosineRestartSchedule:
    """
    Cosine annealing with hard restarts.

    Fields:
        base_lr: Rate at the first step of every cycle.
        total_steps: Steps covered by the schedule.
        n_cycles: Number of cycles; ``cycle_length = total_steps // n_cycles``
            and the last cycle absorbs the remainder.
        min_lr: Floor reached at the end of each cycle.
    """

    base_lr: float
    total_steps: int
    n_cycles: int = 2
    min_lr: float = 0.0

    def __post_init__(self):
        if self.total_steps <= 0:
            raise ConfigurationError(f'total_steps must be positive, got {self.total_steps}')
        if not 0 < self.n_cycles <= self.total_steps:
            raise ConfigurationError(
                f'n_cycles must lie in [1, {self.total_steps}], got {self.n_cycles}'
            )

    @property
    def cycle_length(self):
        return self.total_steps // self.n_cycles

    def locate(self, step):
        """Return ``(offset, length)`` of ``step`` within its cycle."""
        length = self.cycle_length
        cycle = min(step // length, self.n_cycles - 1)
        start = cycle * length
        if cycle == self.n_cycles - 1:
            length = self.total_steps - start
        return step - start, length


def lr_at(schedule, step):
    if not 0 <= step < schedule.total_steps:
        raise RangeError(f'step {step} outside schedule of {schedule.total_steps} steps')
    offset, length = schedule.locate(step)
    span = schedule.base_lr - schedule.min_lr
    return schedule.min_lr + 0.5 * span * (1.0 + math.cos(math.pi * offset / length))
