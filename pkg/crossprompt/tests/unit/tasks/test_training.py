from django.test import override_settings

from crossprompt.app.common.records import TrainingLog
from crossprompt.app.exceptions import ConfigurationError, ContractError
from crossprompt.app.optim import PhasePlan
from crossprompt.app.tasks import adapt_target, train_source
from crossprompt.app.tasks.campaigns import build_model, prepare_campaign, source_datasets
from crossprompt.app.tasks.training import assert_frozen
from crossprompt.app.tensor import SeededRng
from crossprompt.tests.unit.base import TinyExperimentTestCase


class TestTrainingPhases(TinyExperimentTestCase):
    def setUp(self):
        super().setUp()
        self.config = self.load_config()
        self.context = prepare_campaign(self.config, self.suite)
        self.model = build_model(self.config, self.context, SeededRng(0))
        self.records = TrainingLog(seed=0)

    def test_source_phase(self):
        checksum = self.context.stack.checksum()
        outcome = train_source(self.model, source_datasets(self.config, self.suite),
                               self.config.source_phase, SeededRng(0), self.records)
        self.assertEqual(outcome.phase, 'source')
        self.assertLessEqual(outcome.steps, 6)
        self.assertEqual(self.context.stack.checksum(), checksum)
        train = [entry for entry in self.records.entries if entry['kind'] == 'train']
        self.assertEqual([entry['step'] for entry in train], list(range(1, outcome.steps + 1)))
        self.assertTrue(self.records.validations('source'))
        self.assertTrue(0.0 <= outcome.best_val_acc <= 1.0)

    def test_source_phase_reads_only_sources(self):
        train_source(self.model, source_datasets(self.config, self.suite),
                     self.config.source_phase, SeededRng(0), self.records)
        for language in ('syn-u00', 'syn-u01'):
            self.assertFalse(self.suite.dataset(language).reads)

    def test_target_phase_continues_same_parameters(self):
        before = self.model.state_arrays()
        outcome = adapt_target(self.model, self.suite.dataset('syn-u00'),
                               self.config.target_phase, SeededRng(0), self.records)
        self.assertEqual(outcome.phase, 'target')
        self.assertEqual(set(self.model.state_arrays()), set(before))
        self.assertEqual(self.suite.dataset('syn-u00').reads['test'], 0)

    @override_settings(REINIT_HEAD_FOR_TARGET=True)
    def test_target_phase_can_reinitialize_head(self):
        outcome = adapt_target(self.model, self.suite.dataset('syn-u00'),
                               self.config.target_phase, SeededRng(0), self.records)
        self.assertGreater(outcome.steps, 0)

    def test_plan_kind_is_checked(self):
        sources = source_datasets(self.config, self.suite)
        with self.assertRaises(ConfigurationError):
            train_source(self.model, sources, PhasePlan.target(max_steps=2), SeededRng(0),
                         self.records)
        with self.assertRaises(ConfigurationError):
            adapt_target(self.model, self.suite.dataset('syn-u00'),
                         PhasePlan.source(max_steps=2), SeededRng(0), self.records)
        with self.assertRaises(ConfigurationError):
            train_source(self.model, {}, self.config.source_phase, SeededRng(0), self.records)

    def test_unfrozen_backbone_is_refused(self):
        self.context.stack.unfreeze()
        try:
            with self.assertRaises(ContractError):
                assert_frozen(self.context.stack)
            with self.assertRaises(ContractError):
                train_source(self.model, source_datasets(self.config, self.suite),
                             self.config.source_phase, SeededRng(0), self.records)
        finally:
            self.context.stack.freeze()

    def test_deterministic_per_seed(self):
        other = build_model(self.config, self.context, SeededRng(0))
        sources = source_datasets(self.config, self.suite)
        train_source(self.model, sources, self.config.source_phase, SeededRng(0), self.records)
        train_source(other, sources, self.config.source_phase, SeededRng(0), TrainingLog())
        first, second = self.model.state_arrays(), other.state_arrays()
        for name in first:
            self.assertTrue((first[name] == second[name]).all(), name)
