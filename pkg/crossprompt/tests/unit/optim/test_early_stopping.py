from django.test import SimpleTestCase

from crossprompt.app.optim import EarlyStopDecision, EarlyStopPolicy, early_stop_update


class TestEarlyStopping(SimpleTestCase):
    def test_never_fires_before_arming(self):
        policy = EarlyStopPolicy(patience=0, armed_after_step=100)
        early_stop_update(policy, 10, 0, 0.9)
        for step in range(20, 100, 10):
            self.assertIs(early_stop_update(policy, step, 0, 0.1), EarlyStopDecision.CONTINUE)
        self.assertEqual(policy.since_improvement, 0)

    def test_best_tracked_before_arming(self):
        policy = EarlyStopPolicy(patience=1, armed_after_step=100)
        early_stop_update(policy, 50, 0, 0.8)
        self.assertEqual((policy.best, policy.best_step), (0.8, 50))
        self.assertIs(early_stop_update(policy, 100, 1, 0.7), EarlyStopDecision.CONTINUE)
        self.assertIs(early_stop_update(policy, 110, 1, 0.7), EarlyStopDecision.STOP)

    def test_stops_after_patience_exceeded(self):
        policy = EarlyStopPolicy(patience=2, armed_after_step=0)
        decisions = [early_stop_update(policy, step, 0, value)
                     for step, value in enumerate([0.5, 0.5, 0.4, 0.5])]
        self.assertEqual(decisions[:3], [EarlyStopDecision.CONTINUE] * 3)
        self.assertIs(decisions[3], EarlyStopDecision.STOP)

    def test_improvement_resets_counter(self):
        policy = EarlyStopPolicy(patience=1, armed_after_step=0)
        early_stop_update(policy, 0, 0, 0.5)
        early_stop_update(policy, 1, 0, 0.5)
        self.assertEqual(policy.since_improvement, 1)
        early_stop_update(policy, 2, 0, 0.6)
        self.assertEqual(policy.since_improvement, 0)
        self.assertEqual(policy.best_step, 2)
