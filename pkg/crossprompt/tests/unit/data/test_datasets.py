import numpy as np
from django.test import SimpleTestCase

from crossprompt.app.constants import PAD_TOKEN_ID, Split
from crossprompt.app.exceptions import ConfigurationError, RangeError
from crossprompt.app.data import Dataset, LabeledExample, collate
from crossprompt.app.data.datasets import stratified_split_tags
from crossprompt.app.tensor import SeededRng


def _example(tokens, label=0, split=Split.TRAIN):
    return LabeledExample(tokens=tuple(tokens), label=label, language='xx', split=split)


class TestDataset(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(RangeError):
            Dataset('xx', [_example([2, 3], label=3)], 3, 10)
        with self.assertRaises(RangeError):
            Dataset('xx', [_example([2, 10])], 3, 10)

    def test_collate_pads(self):
        tokens, mask, labels = collate([_example([2, 3, 4], 1), _example([5], 2)])
        self.assertEqual(tokens.tolist(), [[2, 3, 4], [5, PAD_TOKEN_ID, PAD_TOKEN_ID]])
        self.assertEqual(mask.tolist(), [[True, True, True], [True, False, False]])
        self.assertEqual(labels.tolist(), [1, 2])

    def test_collate_truncates(self):
        tokens, mask, _ = collate([_example([2, 3, 4, 5])], max_length=2)
        self.assertEqual(tokens.shape, (1, 2))
        self.assertTrue(mask.all())

    def test_collate_empty(self):
        with self.assertRaises(ConfigurationError):
            collate([])

    def test_stratified_split(self):
        labels = np.repeat([0, 1], 20)
        tags = stratified_split_tags(labels, SeededRng(0), 0.1, 0.2)
        for label in (0, 1):
            picked = [tag for tag, value in zip(tags, labels) if value == label]
            self.assertEqual(picked.count(Split.DEV), 2)
            self.assertEqual(picked.count(Split.TEST), 4)
            self.assertEqual(picked.count(Split.TRAIN), 14)
