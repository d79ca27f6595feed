import dataclasses
import enum
import logging
from typing import Optional

log = logging.getLogger(__name__)

__all__ = ('EarlyStopDecision', 'EarlyStopPolicy', 'early_stop_update')


class EarlyStopDecision(enum.Enum):
    CONTINUE = 'continue'
    STOP = 'stop'


@dataclasses.dataclass
class EarlyStopPolicy:
    """
    Patience counter armed at the end of the first schedule cycle.

    Fields:
        patience: Validations without strict improvement tolerated once armed.
        armed_after_step: The policy never fires before this step.
        best: Best validation accuracy seen so far (tracked before arming too).
        best_step: Step at which ``best`` was observed.
        since_improvement: Validations since the last improvement, counted only when armed.
    """

    patience: int
    armed_after_step: int
    best: Optional[float] = None
    best_step: Optional[int] = None
    since_improvement: int = 0

    def armed(self, step):
        return step >= self.armed_after_step


def early_stop_update(policy, step, epoch, val_metric):
    improved = policy.best is None or val_metric > policy.best
    if improved:
        policy.best = val_metric
        policy.best_step = step
    if not policy.armed(step):
        return EarlyStopDecision.CONTINUE
    if improved:
        policy.since_improvement = 0
        return EarlyStopDecision.CONTINUE
    policy.since_improvement += 1
    if policy.since_improvement > policy.patience:
        log.info('Early stop at step %d (epoch %d): no improvement over %.4f for %d validations',
                 step, epoch, policy.best, policy.since_improvement)
        return EarlyStopDecision.STOP
    return EarlyStopDecision.CONTINUE
