from django.test import SimpleTestCase

from crossprompt.app.constants import ENCODER_PARAM_GROUP, PROMPT_PARAM_GROUP, PromptMethod
from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.models import (
    BackboneConfig,
    ClassificationHead,
    EncoderStack,
    PromptComponents,
    PromptedClassifier,
)
from crossprompt.app.optim import ParamGroup, build_param_groups
from crossprompt.app.optim.groups import check_partition
from crossprompt.app.tensor import SeededRng

CONFIG = BackboneConfig(d_model=8, n_layers=1, n_heads=2, d_ffn=16, vocab_size=20,
                        max_positions=16, n_classes=3)


def _model(method, fraction):
    rng = SeededRng(0)
    stack = EncoderStack.initialize(CONFIG, rng.child('stack'))
    stack.freeze()
    head = ClassificationHead.initialize(CONFIG, rng.child('head'))
    components = PromptComponents.build(method, fraction, 4, 8, 2, rng.child('prompt'))
    return PromptedClassifier(CONFIG, stack, head, components)


class TestParamGroups(SimpleTestCase):
    def test_dual_split(self):
        model = _model(PromptMethod.DUAL, 0.5)
        prompt, encoder = build_param_groups(model, prompt_lr=0.3, encoder_lr=0.01,
                                             encoder_weight_decay=0.1)
        self.assertEqual(prompt.name, PROMPT_PARAM_GROUP)
        self.assertEqual([t.name for t in prompt.tensors], ['prompt.standard'])
        self.assertEqual(encoder.name, ENCODER_PARAM_GROUP)
        self.assertEqual(encoder.tensors[0].name, 'prompt.pseudo')
        self.assertIn('head.out.weight', [t.name for t in encoder.tensors])
        self.assertEqual((prompt.lr, encoder.lr, encoder.weight_decay), (0.3, 0.01, 0.1))

    def test_spt_keeps_head_in_encoder_group(self):
        groups = build_param_groups(_model(PromptMethod.SPT, 0.0))
        self.assertEqual([group.name for group in groups],
                         [PROMPT_PARAM_GROUP, ENCODER_PARAM_GROUP])
        self.assertEqual(len(groups[1]), 4)

    def test_xpe_has_no_prompt_group(self):
        groups = build_param_groups(_model(PromptMethod.XPE, 1.0))
        self.assertEqual([group.name for group in groups], [ENCODER_PARAM_GROUP])

    def test_partition_rejects_overlap_and_gaps(self):
        model = _model(PromptMethod.SPT, 0.0)
        tensors = model.trainable_tensors()
        with self.assertRaises(ConfigurationError):
            check_partition([ParamGroup('a', tensors, 0.1, 0.0),
                             ParamGroup('b', tensors[:1], 0.1, 0.0)], tensors)
        with self.assertRaises(ConfigurationError):
            check_partition([ParamGroup('a', tensors[1:], 0.1, 0.0)], tensors)
