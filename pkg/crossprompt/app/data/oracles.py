import logging

import numpy as np

from crossprompt.app.constants import Split
from crossprompt.app.exceptions import ConfigurationError

log = logging.getLogger(__name__)

__all__ = ('FrequencyClassifier', 'reference_accuracy')


class FrequencyClassifier:
    """
    Multinomial naive Bayes over token counts with add-one smoothing.

    ``token_mask`` restricts the features to a subset of token ids; tokens
    outside it are ignored. Ties go to the lowest class index.
    """

    def __init__(self, n_classes, vocab_size, token_mask=None):
        self.n_classes = n_classes
        self.vocab_size = vocab_size
        self.token_mask = token_mask
        self.log_prior = None
        self.log_likelihood = None

    def _features(self, examples):
        counts = np.zeros((len(examples), self.vocab_size), dtype=np.float64)
        for row, example in enumerate(examples):
            np.add.at(counts[row], np.asarray(example.tokens, dtype=np.int64), 1.0)
        if self.token_mask is not None:
            counts *= self.token_mask
        return counts

    def fit(self, examples):
        if not examples:
            raise ConfigurationError('cannot fit a frequency classifier on no examples')
        counts = self._features(examples)
        labels = np.array([example.label for example in examples])
        per_class = np.stack([counts[labels == k].sum(axis=0) for k in range(self.n_classes)])
        per_class += 1.0
        self.log_likelihood = np.log(per_class / per_class.sum(axis=1, keepdims=True))
        priors = np.bincount(labels, minlength=self.n_classes) + 1.0
        self.log_prior = np.log(priors / priors.sum())
        return self

    def predict(self, examples):
        scores = self._features(examples) @ self.log_likelihood.T + self.log_prior
        return np.argmax(scores, axis=1)

    def accuracy(self, examples):
        if not examples:
            return 0.0
        labels = np.array([example.label for example in examples])
        return float(np.mean(self.predict(examples) == labels))


def reference_accuracy(dataset, token_mask=None):
    """Train on the train split, score the test split."""
    classifier = FrequencyClassifier(dataset.n_classes, dataset.vocab_size, token_mask)
    classifier.fit(dataset.split(Split.TRAIN))
    return classifier.accuracy(dataset.split(Split.TEST))
