import logging

from django.conf import settings

from crossprompt.app.constants import Split
from crossprompt.app.evaluation.evaluate import score_examples
from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.models import ClassificationHead, EncoderStack, PromptedClassifier
from crossprompt.app.optim import CosineRestartSchedule, ParamGroup, init_states, lr_at
from crossprompt.app.tensor import SeededRng

from .sampling import sample_multisource_batch
from .training import train_step

log = logging.getLogger(__name__)

__all__ = ('pretrain_and_freeze', 'pretrain_backbone')

PRETRAIN_GROUP = 'backbone'


def pretrain_and_freeze(stack, head, seen_language_datasets, steps=None, rng=None,
                        batch_size=None, lr=None):
    """
    Surrogate pretraining of the backbone on seen-language classification.

    The whole stack and the head train without a prompt. Afterwards every
    stack tensor is frozen, the checksum is taken and the head is
    re-initialized so that prompt runs start from a fresh head.

    Returns ``(stack, checksum)``.
    """
    steps = settings.PRETRAIN_STEPS if steps is None else steps
    batch_size = batch_size or settings.BATCH_SIZE
    rng = rng or SeededRng(settings.PRETRAIN_SEED)
    lr = settings.PRETRAIN_LR if lr is None else lr
    if steps <= 0:
        raise ConfigurationError(f'pretraining steps must be positive, got {steps}')
    datasets = list(seen_language_datasets)
    if not datasets:
        raise ConfigurationError('pretraining needs at least one seen-language dataset')
    unseen = [dataset.language for dataset in datasets if dataset.tag not in (None, 'seen')]
    if unseen:
        raise ConfigurationError(f'pretraining data must come from seen languages, got {unseen}')
    pools = {dataset.language: dataset.split(Split.TRAIN) for dataset in datasets}
    if not any(pools.values()):
        raise ConfigurationError('pretraining datasets have no training examples')

    stack.unfreeze()
    model = PromptedClassifier(stack.config, stack, head, None)
    group = ParamGroup(
        PRETRAIN_GROUP,
        [tensor for _, tensor in stack.named_parameters()]
        + [tensor for _, tensor in head.named_parameters()],
        lr,
        settings.PRETRAIN_WEIGHT_DECAY,
    )
    states = init_states([group])
    schedule = CosineRestartSchedule(base_lr=lr, total_steps=steps, n_cycles=1)
    batch_rng = rng.child('pretrain-batches')
    log.info('Pretraining backbone for %d steps on %d seen languages', steps, len(pools))
    for step in range(steps):
        batch = sample_multisource_batch(pools, batch_size, batch_rng)
        lr_scale = {PRETRAIN_GROUP: lr_at(schedule, step)}
        loss = train_step(model, [group], states, batch.examples, lr_scale)
        if (step + 1) % 500 == 0:
            log.debug('pretrain step %d loss %.4f', step + 1, loss)

    dev = [example for dataset in datasets for example in dataset.split(Split.DEV)]
    if dev:
        log.info('Pretrained backbone: seen-language validation accuracy %.4f',
                 score_examples(model, dev))
    stack.freeze()
    checksum = stack.checksum()
    head.reinitialize(rng.child('head-reinit'))
    return stack, checksum


def pretrain_backbone(config, suite, steps=None, seed=None, languages=None):
    """
    Initialize a stack and head for ``suite`` and pretrain them on its seen languages.

    Without separate pretraining corpora only the seen datasets among
    ``languages`` are read, when given.
    """
    seed = settings.PRETRAIN_SEED if seed is None else seed
    rng = SeededRng(seed).child('backbone')
    stack = EncoderStack.initialize(config, rng.child('stack'))
    head = ClassificationHead.initialize(config, rng.child('head'))
    stack, checksum = pretrain_and_freeze(
        stack, head, suite.pretraining_datasets(languages), steps, rng
    )
    return stack, checksum

