import math
import os
import shutil
import tempfile
import unittest

from django.test import SimpleTestCase

from crossprompt.app.constants import TARGET_GROUPS
from crossprompt.app.evaluation import aggregate, emit_report
from crossprompt.app.serializers import load_experiment_config
from crossprompt.app.tasks.campaigns import prepare_campaign, run_zero_shot
from crossprompt.tests.unit.app.management.commands.base import CONFIGS_DIR

ALIGNED_ALPHA = 0.9


@unittest.skipUnless(os.environ.get('CROSSPROMPT_PERFORMANCE_TESTS'),
                     'set CROSSPROMPT_PERFORMANCE_TESTS to run desk-scale campaigns')
class TestDeskZeroShotCampaign(SimpleTestCase):
    """Five seen and five unseen languages, K=7, three sources and three seeds."""

    def setUp(self):
        super().setUp()
        self.output_dir = tempfile.mkdtemp(suffix='crossprompt_performance')

    def tearDown(self):
        shutil.rmtree(self.output_dir, ignore_errors=True)
        super().tearDown()

    def test_aligned_targets_beat_majority(self):
        config = load_experiment_config(
            os.path.join(CONFIGS_DIR, 'desk-zero-shot.yaml'),
            [f'output_dir={self.output_dir}'],
        )
        context = prepare_campaign(config)
        results = run_zero_shot(config, context=context)
        self.assertEqual(len(results), 3 * 7)

        suite = context.suite
        aligned = {language for language, generated in suite.languages.items()
                   if generated.alpha >= ALIGNED_ALPHA}
        accuracies = [result.accuracy for result in results if result.target in aligned]
        self.assertTrue(accuracies)
        majority = 1 / suite.n_classes
        self.assertGreaterEqual(math.fsum(accuracies) / len(accuracies), majority + 0.20)

        aggregates = aggregate(results, suite.grouping)
        self.assertEqual([item.group for item in aggregates], list(TARGET_GROUPS))
        path = emit_report(aggregates, 'markdown-table',
                           os.path.join(self.output_dir, 'report.md'), config.raw)
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
        for group in TARGET_GROUPS:
            self.assertIn(group, text)
