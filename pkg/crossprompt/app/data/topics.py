import dataclasses
import itertools
import logging
from typing import Tuple

import numpy as np
from django.conf import settings

from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.tensor import SeededRng

from .datasets import Dataset, LabeledExample, stratified_split_tags

log = logging.getLogger(__name__)

__all__ = ('TopicTask', 'generate_dataset')


@dataclasses.dataclass(frozen=True, eq=False)
class TopicTask:
    """
    K-way topic task over latent concepts.

    Each class owns ``keywords_per_class`` keyword concepts, disjoint across
    classes. A class draws a keyword with probability ``signal`` and any
    concept uniformly otherwise, so two classes are ``signal`` apart in total
    variation.

    Fields:
        n_classes: K.
        concept_vocab: Number of latent concepts V.
        distributions: K×V class-conditional concept distributions.
        length_range: Inclusive ``(min, max)`` text length in tokens.
    """

    n_classes: int
    concept_vocab: int
    distributions: np.ndarray
    length_range: Tuple[int, int]
    label_names: Tuple[str, ...] = ()

    @classmethod
    def generate(cls, seed, n_classes=7, concept_vocab=64, keywords_per_class=6, signal=0.5,
                 length_range=(8, 16), tv_floor=0.2):
        if n_classes < 2:
            raise ConfigurationError(f'a topic task needs at least two classes, got {n_classes}')
        if n_classes * keywords_per_class > concept_vocab:
            raise ConfigurationError(
                f'{n_classes} classes × {keywords_per_class} keywords '
                f'exceed {concept_vocab} concepts'
            )
        if not 0.0 < signal <= 1.0:
            raise ConfigurationError(f'signal must lie in (0, 1], got {signal}')
        low, high = length_range
        if not 1 <= low <= high:
            raise ConfigurationError(f'invalid length range {length_range}')
        rng = SeededRng(seed).child('topics')
        keywords = rng.permutation(concept_vocab)[:n_classes * keywords_per_class]
        distributions = np.full((n_classes, concept_vocab), (1.0 - signal) / concept_vocab)
        for label in range(n_classes):
            owned = keywords[label * keywords_per_class:(label + 1) * keywords_per_class]
            distributions[label, owned] += signal / keywords_per_class
        task = cls(
            n_classes=n_classes,
            concept_vocab=concept_vocab,
            distributions=distributions,
            length_range=(int(low), int(high)),
            label_names=tuple(f'topic-{label}' for label in range(n_classes)),
        )
        if task.min_total_variation() < tv_floor:
            raise ConfigurationError(
                f'class distributions are {task.min_total_variation():.3f} apart, below {tv_floor}'
            )
        return task

    def min_total_variation(self):
        return min(
            0.5 * float(np.abs(self.distributions[i] - self.distributions[j]).sum())
            for i, j in itertools.combinations(range(self.n_classes), 2)
        )

    def sample_concepts(self, label, rng):
        length = int(rng.integers(self.length_range[0], self.length_range[1] + 1))
        return rng.choice(self.concept_vocab, size=length, p=self.distributions[label])


def generate_dataset(language, task, n_per_class, rng, dev_fraction=None, test_fraction=None):
    """
    Class-balanced examples of ``task`` realized in ``language``.

    Latent concept draws depend only on ``rng``, so the same rng state under
    two languages yields texts that differ only by the language mapping.
    """
    if n_per_class < 1:
        raise ConfigurationError(f'n_per_class must be at least 1, got {n_per_class}')
    if task.concept_vocab != language.layout.concept_vocab:
        raise ConfigurationError(
            f'task has {task.concept_vocab} concepts, {language.language_id} has '
            f'{language.layout.concept_vocab}'
        )
    dev_fraction = settings.VALIDATION_FRACTION if dev_fraction is None else dev_fraction
    test_fraction = settings.TEST_FRACTION if test_fraction is None else test_fraction

    labels = np.repeat(np.arange(task.n_classes), n_per_class)
    texts = [tuple(int(t) for t in language.encode(task.sample_concepts(label, rng)))
             for label in labels]
    tags = stratified_split_tags(labels, rng, dev_fraction, test_fraction)
    examples = [
        LabeledExample(tokens=text, label=int(label), language=language.language_id, split=tag)
        for text, label, tag in zip(texts, labels, tags)
    ]
    dataset = Dataset(
        language.language_id,
        examples,
        task.n_classes,
        language.layout.vocab_size,
        tag=language.tag,
        label_names=task.label_names,
    )
    log.debug('Generated %s: %s', dataset, dataset.split_sizes())
    return dataset

