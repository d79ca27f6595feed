"""Source-phase training and target adaptation of a prompted classifier.

Both phases run the same loop: a fixed step budget, one Adafactor update
per batch with per-group cosine-with-restarts rates, one validation per
epoch (and at the final step), and early stopping armed after the first
schedule cycle. The best validation state is restored at the end. The
backbone checksum is compared before and after every phase.
"""
import dataclasses
import logging
import math
import time

import numpy as np
from django.conf import settings

from crossprompt.app.common import metrics
from crossprompt.app.constants import PhaseKind, Split
from crossprompt.app.data.datasets import collate
from crossprompt.app.evaluation.evaluate import score_examples
from crossprompt.app.exceptions import ConfigurationError, ContractError
from crossprompt.app.optim import (
    EarlyStopDecision,
    adafactor_step,
    build_param_groups,
    early_stop_update,
    init_states,
    lr_at,
)
from crossprompt.app.tensor import Tape, backward, ops

from .sampling import sample_multisource_batch

log = logging.getLogger(__name__)

__all__ = (
    'PhaseOutcome',
    'train_step',
    'train_source',
    'adapt_target',
    'assert_frozen',
)


@dataclasses.dataclass
class PhaseOutcome:
    """
    Fields:
        phase: ``source`` or ``target``.
        steps: Optimizer steps taken.
        epochs: Validation epochs completed.
        best_step: Step of the restored state.
        best_val_acc: Validation accuracy of the restored state.
        stopped_early: Whether early stopping halted the phase.
        wall_time: Seconds spent in the loop.
    """

    phase: str
    steps: int
    epochs: int
    best_step: int
    best_val_acc: float
    stopped_early: bool
    wall_time: float


def assert_frozen(stack):
    live = [name for name, tensor in stack.named_parameters() if tensor.trainable]
    if live or not stack.frozen:
        raise ContractError(f'backbone is not frozen ({len(live)} trainable tensors)')


def train_step(model, groups, states, examples, lr_scale):
    """One forward, reverse pass and Adafactor update; returns the batch loss."""
    tokens, mask, labels = collate(examples)
    for group in groups:
        for tensor in group.tensors:
            tensor.zero_grad()
    with Tape() as tape:
        loss = ops.cross_entropy(model.logits(tokens, mask), labels)
    backward(loss, tape)
    adafactor_step(groups, states, lr_scale=lr_scale)
    return loss.item()


def _run_phase(model, plan, train_pools, dev_examples, rng, records):
    phase = plan.kind.value
    assert_frozen(model.stack)
    checksum = model.stack.checksum()
    n_train = sum(len(examples) for examples in train_pools.values())
    if not n_train:
        raise ConfigurationError(f'{phase} phase has no training examples')
    if not dev_examples:
        log.warning('%s phase has no validation split; validating on training data', phase)
        dev_examples = [example for examples in train_pools.values() for example in examples]

    groups = build_param_groups(model)
    states = init_states(groups)
    schedules = {group.name: plan.schedule(group.lr) for group in groups}
    policy = plan.early_stop_policy()
    steps_per_epoch = max(1, math.ceil(n_train / plan.batch_size))
    batch_rng = rng.child('batches')
    log.info('%s phase: %d steps max, %d steps/epoch, early stopping armed at step %d',
             phase, plan.max_steps, steps_per_epoch, plan.armed_after_step)

    started = time.monotonic()
    best_state, best_step, best_acc = model.state_arrays(), 0, -math.inf
    step = epoch = 0
    stopped = False
    while step < plan.max_steps:
        lr_scale = {name: lr_at(schedule, step) for name, schedule in schedules.items()}
        batch = sample_multisource_batch(train_pools, plan.batch_size, batch_rng)
        loss = train_step(model, groups, states, batch.examples, lr_scale)
        if not np.isfinite(loss):
            log.warning('%s phase: non-finite loss at step %d', phase, step)
        metrics.optimizer_steps.labels(phase=phase).inc()
        step += 1

        val_acc = None
        if step % steps_per_epoch == 0 or step == plan.max_steps:
            if step % steps_per_epoch == 0:
                epoch += 1
            val_acc = score_examples(model, dev_examples)
            if val_acc > best_acc:
                best_state, best_step, best_acc = model.state_arrays(), step, val_acc
            decision = early_stop_update(policy, step, epoch, val_acc)
            stopped = decision is EarlyStopDecision.STOP
        records.record(step=step, epoch=epoch, phase=phase, lr=lr_scale[groups[0].name],
                       loss=loss, val_acc=val_acc)
        if stopped:
            metrics.early_stops.labels(phase=phase).inc()
            break

    model.load_state_arrays(best_state)
    if model.stack.checksum() != checksum:
        raise ContractError(f'backbone weights changed during the {phase} phase')
    outcome = PhaseOutcome(
        phase=phase,
        steps=step,
        epochs=epoch,
        best_step=best_step,
        best_val_acc=best_acc,
        stopped_early=stopped,
        wall_time=time.monotonic() - started,
    )
    log.info('%s phase done: %d steps, best val %.4f at step %d%s', phase, step, best_acc,
             best_step, ' (early stop)' if stopped else '')
    return outcome


def train_source(model, sources, plan, rng, records):
    """
    Multi-source phase: one shared prompt trained on every source's train split.

    Args:
        model: ``PromptedClassifier`` with a frozen stack.
        sources: Language id to ``Dataset``.
        plan: Source ``PhasePlan``.
        rng: ``SeededRng`` of the run.
        records: ``TrainingLog`` receiving one record per step.
    """
    if plan.kind is not PhaseKind.SOURCE:
        raise ConfigurationError(f'train_source needs a source plan, got {plan.kind.value}')
    if not sources:
        raise ConfigurationError('train_source needs at least one source language')
    train_pools = {language: dataset.split(Split.TRAIN) for language, dataset in sources.items()}
    dev_examples = [
        example for dataset in sources.values() for example in dataset.split(Split.DEV)
    ]
    return _run_phase(model, plan, train_pools, dev_examples, rng.child('source'), records)


def adapt_target(model, target, plan, rng, records, sources=()):
    """
    Continue training the same trainable set on one target language.

    The head carries over from the source phase unless
    ``REINIT_HEAD_FOR_TARGET`` is set.
    """
    if plan.kind is not PhaseKind.TARGET:
        raise ConfigurationError(f'adapt_target needs a target plan, got {plan.kind.value}')
    if target.language in set(sources):
        log.warning('Target %s is also a source language', target.language)
    train = target.split(Split.TRAIN)
    if not train:
        raise ConfigurationError(f'target {target.language} has no training examples')
    if settings.REINIT_HEAD_FOR_TARGET:
        model.head.reinitialize(rng.child('target-head'))
    return _run_phase(
        model, plan, {target.language: train}, target.split(Split.DEV),
        rng.child('target', target.language), records,
    )
