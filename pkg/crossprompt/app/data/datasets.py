import collections
import dataclasses
import logging
from typing import List, Optional, Tuple

import numpy as np

from crossprompt.app.common import metrics
from crossprompt.app.constants import PAD_TOKEN_ID, Split
from crossprompt.app.exceptions import ConfigurationError, RangeError

log = logging.getLogger(__name__)

__all__ = (
    'LabeledExample',
    'Dataset',
    'collate',
    'stratified_split_tags',
)


@dataclasses.dataclass(frozen=True)
class LabeledExample:
    tokens: Tuple[int, ...]
    label: int
    language: str
    split: Split


class Dataset:
    """
    Labeled examples of one language.

    Split reads go through ``split`` so that every access is counted, per
    language and split, in ``reads`` and in the dataset split read counter.
    """

    def __init__(self, language, examples, n_classes, vocab_size, tag=None, label_names=None):
        self.language = language
        self.examples = list(examples)
        self.n_classes = int(n_classes)
        self.vocab_size = int(vocab_size)
        self.tag = tag
        self.label_names = list(label_names) if label_names else [str(k) for k in range(n_classes)]
        self.reads = collections.Counter()
        self._validate()

    def _validate(self):
        for example in self.examples:
            if not 0 <= example.label < self.n_classes:
                raise RangeError(
                    f'{self.language}: label {example.label} outside [0, {self.n_classes})'
                )
            tokens = example.tokens
            if tokens and (min(tokens) < 0 or max(tokens) >= self.vocab_size):
                raise RangeError(f'{self.language}: token id outside [0, {self.vocab_size})')

    def __len__(self):
        return len(self.examples)

    def __repr__(self):
        return f'<Dataset {self.language} n={len(self)} K={self.n_classes}>'

    def split(self, name):
        split = Split(name)
        self.reads[split.value] += 1
        metrics.dataset_split_reads.labels(language=self.language, split=split.value).inc()
        return [example for example in self.examples if example.split is split]

    def split_sizes(self):
        counts = collections.Counter(example.split.value for example in self.examples)
        return {split.value: counts.get(split.value, 0) for split in Split}

    def label_histogram(self):
        return np.bincount([example.label for example in self.examples], minlength=self.n_classes)


def collate(examples, max_length: Optional[int] = None):
    """Pad a list of examples into ``(tokens B×T, mask B×T, labels B)``."""
    if not examples:
        raise ConfigurationError('cannot batch an empty list of examples')
    length = max(len(example.tokens) for example in examples)
    if max_length is not None:
        length = min(length, max_length)
    tokens = np.full((len(examples), length), PAD_TOKEN_ID, dtype=np.int64)
    mask = np.zeros((len(examples), length), dtype=bool)
    for row, example in enumerate(examples):
        ids = example.tokens[:length]
        tokens[row, :len(ids)] = ids
        mask[row, :len(ids)] = True
    labels = np.array([example.label for example in examples], dtype=np.int64)
    return tokens, mask, labels


def stratified_split_tags(labels, rng, dev_fraction=0.1, test_fraction=0.1) -> List[Split]:
    """
    Assign train/dev/test per class.

    Within each class the examples are shuffled; ``round(n·dev_fraction)``
    go to dev, ``round(n·test_fraction)`` to test and the rest to train.
    """
    labels = np.asarray(labels, dtype=np.int64)
    tags = [Split.TRAIN] * len(labels)
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        members = members[rng.permutation(len(members))]
        n_dev = int(round(len(members) * dev_fraction))
        n_test = int(round(len(members) * test_fraction))
        for index in members[:n_dev]:
            tags[index] = Split.DEV
        for index in members[n_dev:n_dev + n_test]:
            tags[index] = Split.TEST
    return tags
