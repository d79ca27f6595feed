import logging

import numpy as np
from django.conf import settings

from crossprompt.app.constants import Split
from crossprompt.app.data.datasets import collate
from crossprompt.app.models.classifier import PromptedClassifier

log = logging.getLogger(__name__)

__all__ = ('score_examples', 'evaluate')


def score_examples(model, examples, prompt=None, batch_size=None):
    """
    Accuracy of ``model`` over ``examples``, argmax with lowest-index ties.

    The prompt is resolved once, outside any tape, and reused for every batch.
    """
    if not examples:
        return 0.0
    batch_size = batch_size or settings.BATCH_SIZE
    prompt = model.resolve_prompt(prompt)
    correct = 0
    for start in range(0, len(examples), batch_size):
        tokens, mask, labels = collate(examples[start:start + batch_size])
        predictions = model.predict(tokens, mask, prompt)
        correct += int(np.sum(predictions == labels))
    return correct / len(examples)


def evaluate(stack, head, cached_prompt, dataset, batch_size=None):
    """
    Test-split accuracy through the cached prompt only.

    No prompt components are attached to the classifier, so the prompt
    encoder cannot run. Raises CompatibilityError when the cache width does
    not match the backbone.
    """
    model = PromptedClassifier(stack.config, stack, head, None)
    cached_prompt.check_width(stack.config.d_model)
    examples = dataset.split(Split.TEST)
    accuracy = score_examples(model, examples, cached_prompt, batch_size)
    log.debug('%s: accuracy %.4f over %d test examples', dataset.language, accuracy, len(examples))
    return accuracy
