import collections

from django.test import SimpleTestCase

from crossprompt.app.constants import (
    GROUP_ALL_WO_SOURCES,
    GROUP_LOW_PERFORMING,
    GROUP_SEEN_WO_SOURCES,
    GROUP_UNSEEN,
)
from crossprompt.app.data.grouping import LanguageGrouping, LanguageInfo
from crossprompt.app.exceptions import AggregationError
from crossprompt.app.evaluation import aggregate
from crossprompt.app.evaluation.aggregate import language_means
from crossprompt.app.models import RunResult


def make_grouping():
    return LanguageGrouping(
        collections.OrderedDict([
            ('s0', LanguageInfo(True, 0.9)),
            ('s1', LanguageInfo(True, 0.9)),
            ('s2', LanguageInfo(True, 0.9)),
            ('u0', LanguageInfo(False, 0.3)),
            ('u1', LanguageInfo(False, 0.8)),
        ]),
        {'pair': ['s0', 's1']},
        0.6,
    )


def make_result(target, seed, accuracy, method='XPE', source_set='pair',
                supervision='zero-shot'):
    return RunResult(method=method, source_set=source_set, target=target, seed=seed,
                     supervision=supervision, accuracy=accuracy, steps=10, wall_time=1.0,
                     n_test=10)


class TestAggregate(SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.grouping = make_grouping()
        self.results = [
            make_result('s2', 0, 0.8), make_result('u0', 0, 0.2), make_result('u1', 0, 0.6),
            make_result('s2', 1, 0.6), make_result('u0', 1, 0.4), make_result('u1', 1, 0.4),
        ]

    def by_group(self, results):
        return {item.group: item for item in aggregate(results, self.grouping)}

    def test_group_means(self):
        groups = self.by_group(self.results)
        self.assertEqual(list(groups), [GROUP_ALL_WO_SOURCES, GROUP_SEEN_WO_SOURCES,
                                        GROUP_UNSEEN, GROUP_LOW_PERFORMING])
        seen = groups[GROUP_SEEN_WO_SOURCES]
        self.assertEqual(seen.members, ('s2',))
        self.assertAlmostEqual(seen.mean, 0.7)
        self.assertAlmostEqual(seen.std, 0.14142135623730953)
        unseen = groups[GROUP_UNSEEN]
        self.assertAlmostEqual(unseen.per_seed[0], 0.4)
        self.assertAlmostEqual(unseen.per_seed[1], 0.4)
        self.assertAlmostEqual(unseen.std, 0.0)
        self.assertEqual(groups[GROUP_LOW_PERFORMING].members, ('u0',))
        self.assertAlmostEqual(groups[GROUP_ALL_WO_SOURCES].mean, 0.5)

    def test_order_independent(self):
        forward = aggregate(self.results, self.grouping)
        backward = aggregate(list(reversed(self.results)), self.grouping)
        self.assertEqual([item.as_dict() for item in forward],
                         [item.as_dict() for item in backward])

    def test_single_seed_has_zero_std(self):
        groups = self.by_group(self.results[:3])
        self.assertEqual(groups[GROUP_UNSEEN].std, 0.0)

    def test_empty_group(self):
        groups = self.by_group([make_result('s2', 0, 0.5)])
        self.assertTrue(groups[GROUP_UNSEEN].is_empty)
        self.assertIsNone(groups[GROUP_UNSEEN].std)
        self.assertEqual(groups[GROUP_UNSEEN].members, ())

    def test_explicit_source_list(self):
        groups = self.by_group([make_result('s0', 0, 0.5, source_set='s1+s2')])
        self.assertEqual(groups[GROUP_SEEN_WO_SOURCES].members, ('s0',))

    def test_unknown_target(self):
        with self.assertRaises(AggregationError):
            aggregate([make_result('zz', 0, 0.5)], self.grouping)

    def test_cells_are_separate(self):
        results = self.results + [make_result('u0', 0, 1.0, method='SPT')]
        columns = {item.column for item in aggregate(results, self.grouping)}
        self.assertEqual(columns, {'XPE / pair', 'SPT / pair'})

    def test_language_means(self):
        means = language_means(self.results)
        self.assertAlmostEqual(means[(('zero-shot', 'XPE', 'pair'), 'u0')], 0.3)
