from django.test import SimpleTestCase, override_settings

from crossprompt.app.constants import PhaseKind
from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.optim import PhasePlan


class TestPhasePlan(SimpleTestCase):
    def test_defaults_from_settings(self):
        source = PhasePlan.source()
        self.assertIs(source.kind, PhaseKind.SOURCE)
        self.assertEqual(source.max_steps, 24000)
        self.assertEqual(source.batch_size, 32)
        self.assertEqual(PhasePlan.target().max_steps, 6000)

    @override_settings(SOURCE_MAX_STEPS=80, SCHEDULE_CYCLES=4)
    def test_arming_follows_first_cycle(self):
        plan = PhasePlan.source()
        self.assertEqual(plan.armed_after_step, 20)
        self.assertEqual(plan.early_stop_policy().armed_after_step, 20)
        self.assertEqual(plan.schedule(0.1).cycle_length, 20)

    def test_overrides_and_validation(self):
        self.assertEqual(PhasePlan.target(max_steps=10).max_steps, 10)
        with self.assertRaises(ConfigurationError):
            PhasePlan.source(batch_size=0)
        with self.assertRaises(ConfigurationError):
            PhasePlan.source(patience=-1)

    def test_as_dict(self):
        self.assertEqual(PhasePlan.target().as_dict()['kind'], 'target')
