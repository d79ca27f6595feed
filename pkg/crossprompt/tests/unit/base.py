import copy
import shutil
import tempfile

from django.test import SimpleTestCase

from crossprompt.app.data import SyntheticSuiteConfig, build_synthetic_suite
from crossprompt.app.serializers import load_experiment_config

TINY_SUITE = {
    'seed': 0,
    'n_seen': 3,
    'n_unseen': 2,
    'n_classes': 3,
    'n_per_class': 20,
    'concept_vocab': 32,
    'keywords_per_class': 4,
    'length_range': [6, 10],
}

TINY_EXPERIMENT = {
    'name': 'tiny',
    'backbone': {
        'd_model': 8,
        'n_layers': 1,
        'n_heads': 2,
        'd_ffn': 16,
        'max_positions': 32,
    },
    'method': 'DUAL-50',
    'prompt_length': 4,
    'bottleneck': 4,
    'sources': 'compact-3',
    'seeds': [0],
    'pretrain_steps': 4,
    'source_phase': {'max_steps': 6, 'batch_size': 8, 'patience': 2},
    'target_phase': {'max_steps': 4, 'batch_size': 8, 'patience': 2},
    'data': {'synthetic': TINY_SUITE},
}


def tiny_document(**changes):
    document = copy.deepcopy(TINY_EXPERIMENT)
    document.update(changes)
    return document


class TinyExperimentTestCase(SimpleTestCase):
    """Builds the tiny synthetic suite once and gives every test its own output directory."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.suite = build_synthetic_suite(SyntheticSuiteConfig.from_dict(TINY_SUITE))

    def setUp(self):
        super().setUp()
        self.output_dir = tempfile.mkdtemp(suffix='crossprompt_unittest')
        self.suite.reset_reads()

    def tearDown(self):
        shutil.rmtree(self.output_dir, ignore_errors=True)
        super().tearDown()

    def load_config(self, **changes):
        changes.setdefault('output_dir', self.output_dir)
        return load_experiment_config(document=tiny_document(**changes))
