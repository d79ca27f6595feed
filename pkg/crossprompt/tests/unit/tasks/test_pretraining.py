from django.test import SimpleTestCase

from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.models import BackboneConfig, ClassificationHead, EncoderStack
from crossprompt.app.tasks import pretrain_and_freeze, pretrain_backbone
from crossprompt.app.data import SyntheticSuiteConfig, build_synthetic_suite
from crossprompt.app.tensor import SeededRng
from crossprompt.tests.unit.base import TINY_SUITE


class TestPretraining(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.suite = build_synthetic_suite(SyntheticSuiteConfig.from_dict(TINY_SUITE))
        cls.config = BackboneConfig(d_model=8, n_layers=1, n_heads=2, d_ffn=16,
                                    vocab_size=cls.suite.vocab_size, max_positions=32,
                                    n_classes=cls.suite.n_classes)

    def test_pretrain_and_freeze(self):
        stack, checksum = pretrain_backbone(self.config, self.suite, steps=3, seed=1)
        self.assertTrue(stack.frozen)
        self.assertTrue(all(not tensor.trainable for _, tensor in stack.named_parameters()))
        self.assertEqual(stack.checksum(), checksum)

    def test_weights_move_during_pretraining(self):
        rng = SeededRng(0)
        stack = EncoderStack.initialize(self.config, rng.child('stack'))
        initial = stack.checksum()
        head = ClassificationHead.initialize(self.config, rng.child('head'))
        _, checksum = pretrain_and_freeze(stack, head, self.suite.pretraining_datasets(),
                                          steps=2, rng=rng, batch_size=8)
        self.assertNotEqual(checksum, initial)

    def test_same_seed_same_backbone(self):
        _, first = pretrain_backbone(self.config, self.suite, steps=2, seed=4)
        _, second = pretrain_backbone(self.config, self.suite, steps=2, seed=4)
        self.assertEqual(first, second)

    def test_unseen_languages_refused(self):
        rng = SeededRng(0)
        stack = EncoderStack.initialize(self.config, rng.child('stack'))
        head = ClassificationHead.initialize(self.config, rng.child('head'))
        with self.assertRaises(ConfigurationError):
            pretrain_and_freeze(stack, head, [self.suite.dataset('syn-u00')], steps=1)
        with self.assertRaises(ConfigurationError):
            pretrain_and_freeze(stack, head, [], steps=1)
        with self.assertRaises(ConfigurationError):
            pretrain_and_freeze(stack, head, self.suite.pretraining_datasets(), steps=0)
