import os
import tempfile

import yaml
from django.test import SimpleTestCase, override_settings

from crossprompt.app.constants import DEFAULT_SWEEP_METHODS, PhaseKind, PromptMethod
from crossprompt.app.exceptions import CacheIOError, ConfigurationError
from crossprompt.app.serializers import load_experiment_config
from crossprompt.app.serializers.config import apply_overrides
from crossprompt.tests.unit.base import TINY_EXPERIMENT, tiny_document


class TestApplyOverrides(SimpleTestCase):
    def test_nested_paths(self):
        document = apply_overrides({'a': {'b': 1}}, ['a.b=2', 'a.c.d=[1, 2]', 'e=text'])
        self.assertEqual(document, {'a': {'b': 2, 'c': {'d': [1, 2]}}, 'e': 'text'})

    def test_original_untouched(self):
        original = {'a': {'b': 1}}
        apply_overrides(original, ['a.b=5'])
        self.assertEqual(original, {'a': {'b': 1}})

    def test_malformed(self):
        with self.assertRaises(ConfigurationError):
            apply_overrides({}, ['no-equals-sign'])
        with self.assertRaises(ConfigurationError):
            apply_overrides({}, ['=value'])


class TestLoadExperimentConfig(SimpleTestCase):
    def test_tiny_document(self):
        config = load_experiment_config(document=tiny_document())
        self.assertEqual(config.name, 'tiny')
        self.assertEqual(config.parsed_method, (PromptMethod.DUAL, 0.5))
        self.assertEqual(config.prompt_length, 4)
        self.assertEqual(config.source_phase.kind, PhaseKind.SOURCE)
        self.assertEqual(config.source_phase.max_steps, 6)
        self.assertEqual(config.target_phase.kind, PhaseKind.TARGET)
        self.assertEqual(config.target_phase.patience, 2)
        self.assertEqual(config.raw, TINY_EXPERIMENT)

    @override_settings(PROMPT_LENGTH=20, ENCODER_BOTTLENECK=256, TARGET_MAX_STEPS=6000,
                       TARGET_PATIENCE=30)
    def test_protocol_defaults(self):
        document = tiny_document()
        for key in ('prompt_length', 'bottleneck', 'target_phase', 'seeds'):
            document.pop(key)
        config = load_experiment_config(document=document)
        self.assertEqual(config.prompt_length, 20)
        self.assertEqual(config.bottleneck, 256)
        self.assertEqual(config.target_phase.max_steps, 6000)
        self.assertEqual(config.target_phase.patience, 30)
        self.assertIsNone(config.seeds)
        self.assertEqual(config.sweep_methods, list(DEFAULT_SWEEP_METHODS))

    def test_method_label_normalized(self):
        config = load_experiment_config(document=tiny_document(method='dual-30'))
        self.assertEqual(config.method, 'DUAL-30')

    def test_source_list(self):
        config = load_experiment_config(document=tiny_document(sources=['syn-s00', 'syn-s01']))
        self.assertEqual(config.source_set_id, 'syn-s00+syn-s01')

    def test_overrides(self):
        config = load_experiment_config(
            document=tiny_document(), overrides=['source_phase.max_steps=9', 'method=SPT'],
        )
        self.assertEqual(config.source_phase.max_steps, 9)
        self.assertEqual(config.method, 'SPT')

    def test_with_overrides_updates_echo(self):
        config = load_experiment_config(document=tiny_document())
        cell = config.with_overrides(method='SPT', sources=['syn-s00'])
        self.assertEqual(cell.raw['method'], 'SPT')
        self.assertEqual(cell.raw['sources'], ['syn-s00'])
        self.assertEqual(cell.raw['backbone'], config.raw['backbone'])
        self.assertEqual(config.raw['method'], 'DUAL-50')
        self.assertEqual(config.raw['sources'], 'compact-3')

    def test_invalid_fields(self):
        cases = [
            tiny_document(method='DUAL'),
            tiny_document(method='LoRA'),
            tiny_document(seeds=[1, 1]),
            tiny_document(sources=[]),
            tiny_document(prompt_length=0),
            tiny_document(source_phase={'max_steps': 2, 'n_cycles': 3}),
            tiny_document(sweep={'methods': ['DUAL-150']}),
        ]
        bad_backbone = tiny_document()
        bad_backbone['backbone'] = dict(bad_backbone['backbone'], n_heads=3)
        cases.append(bad_backbone)
        for document in cases:
            with self.assertRaises(ConfigurationError, msg=document):
                load_experiment_config(document=document)

    def test_error_names_the_field(self):
        with self.assertRaisesRegex(ConfigurationError, 'backbone.n_heads'):
            document = tiny_document()
            document['backbone'] = dict(document['backbone'], n_heads=3)
            load_experiment_config(document=document)

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'tiny.yaml')
            with open(path, 'w') as handle:
                yaml.safe_dump(tiny_document(), handle)
            config = load_experiment_config(path)
            self.assertEqual(config.name, 'tiny')

            with open(path, 'w') as handle:
                handle.write('- a list\n- not a mapping\n')
            with self.assertRaises(ConfigurationError):
                load_experiment_config(path)

            with self.assertRaises(CacheIOError):
                load_experiment_config(os.path.join(tmp, 'missing.yaml'))
