import numpy as np
from django.test import SimpleTestCase

from crossprompt.app.constants import Split
from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.data import TopicTask, generate_dataset, generate_language_family
from crossprompt.app.tensor import SeededRng


class TestTopicTask(SimpleTestCase):
    def test_distributions(self):
        task = TopicTask.generate(0, n_classes=4, concept_vocab=32, keywords_per_class=4)
        np.testing.assert_allclose(task.distributions.sum(axis=1), np.ones(4))
        self.assertAlmostEqual(task.min_total_variation(), 0.5)
        self.assertEqual(task.label_names[0], 'topic-0')

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            TopicTask.generate(0, n_classes=1)
        with self.assertRaises(ConfigurationError):
            TopicTask.generate(0, n_classes=8, concept_vocab=16, keywords_per_class=3)
        with self.assertRaises(ConfigurationError):
            TopicTask.generate(0, signal=0.1)


class TestGenerateDataset(SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.languages = generate_language_family(0, 2, 1, concept_vocab=32)
        self.task = TopicTask.generate(0, n_classes=4, concept_vocab=32, keywords_per_class=4)

    def test_class_balanced_with_splits(self):
        dataset = generate_dataset(self.languages[0], self.task, 20, SeededRng(1))
        self.assertEqual(len(dataset), 80)
        self.assertEqual(dataset.label_histogram().tolist(), [20, 20, 20, 20])
        self.assertEqual(dataset.split_sizes(), {'train': 64, 'dev': 8, 'test': 8})
        self.assertEqual(dataset.tag, 'seen')

    def test_parallel_across_languages(self):
        first = generate_dataset(self.languages[0], self.task, 5, SeededRng(1))
        second = generate_dataset(self.languages[2], self.task, 5, SeededRng(1))
        for a, b in zip(first.examples, second.examples):
            self.assertEqual(a.label, b.label)
            self.assertIs(a.split, b.split)
            np.testing.assert_array_equal(self.languages[0].decode(np.array(a.tokens)),
                                          self.languages[2].decode(np.array(b.tokens)))

    def test_split_reads_are_counted(self):
        dataset = generate_dataset(self.languages[0], self.task, 5, SeededRng(1))
        dataset.split(Split.TEST)
        dataset.split('test')
        self.assertEqual(dataset.reads['test'], 2)
        self.assertEqual(dataset.reads['train'], 0)

    def test_concept_vocab_mismatch(self):
        task = TopicTask.generate(0, n_classes=4, concept_vocab=64)
        with self.assertRaises(ConfigurationError):
            generate_dataset(self.languages[0], task, 5, SeededRng(1))
