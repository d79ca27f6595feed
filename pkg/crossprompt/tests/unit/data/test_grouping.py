import os
import tempfile

from django.test import SimpleTestCase

from crossprompt.app.constants import (
    GROUP_ALL_WO_SOURCES,
    GROUP_LOW_PERFORMING,
    GROUP_SEEN_WO_SOURCES,
    GROUP_UNSEEN,
)
from crossprompt.app.exceptions import CacheIOError, ConfigurationError, FormatError
from crossprompt.app.data import (
    classify_low_performing,
    load_grouping,
    resolve_groups,
    select_supervised_targets,
)
from crossprompt.app.data.grouping import default_source_sets, save_grouping
from crossprompt.app.tensor import SeededRng

GROUPING = """\
threshold: 0.6
languages:
  eng_Latn: {seen: true, reference_accuracy: 0.9}
  deu_Latn: {seen: true, reference_accuracy: 0.85}
  zho_Hans: {seen: true, reference_accuracy: 0.8}
  fon_Latn: {seen: false, reference_accuracy: 0.4}
  quy_Latn: {seen: false, reference_accuracy: 0.7}
source_sets:
  pair: [eng_Latn, deu_Latn]
"""


class TestGrouping(SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'grouping.yaml')
        with open(self.path, 'w', encoding='utf-8') as handle:
            handle.write(GROUPING)
        self.grouping = load_grouping(self.path)

    def tearDown(self):
        self.tmp.cleanup()
        super().tearDown()

    def test_load(self):
        self.assertEqual(list(self.grouping.languages),
                         ['eng_Latn', 'deu_Latn', 'zho_Hans', 'fon_Latn', 'quy_Latn'])
        self.assertEqual(self.grouping.unseen, {'fon_Latn', 'quy_Latn'})
        self.assertEqual(self.grouping.source_sets['pair'], ['eng_Latn', 'deu_Latn'])

    def test_save_round_trip(self):
        path = save_grouping(self.grouping, os.path.join(self.tmp.name, 'copy.yaml'))
        self.assertEqual(load_grouping(path), self.grouping)

    def test_resolve_groups_by_name(self):
        groups = resolve_groups(self.grouping, 'pair')
        self.assertEqual(list(groups), [GROUP_ALL_WO_SOURCES, GROUP_SEEN_WO_SOURCES,
                                        GROUP_UNSEEN, GROUP_LOW_PERFORMING])
        self.assertEqual(groups[GROUP_ALL_WO_SOURCES], {'zho_Hans', 'fon_Latn', 'quy_Latn'})
        self.assertEqual(groups[GROUP_SEEN_WO_SOURCES], {'zho_Hans'})
        self.assertEqual(groups[GROUP_LOW_PERFORMING], {'fon_Latn'})

    def test_resolve_groups_by_list(self):
        groups = resolve_groups(self.grouping, ['zho_Hans'])
        self.assertEqual(groups[GROUP_SEEN_WO_SOURCES], {'eng_Latn', 'deu_Latn'})

    def test_unknown_source_set(self):
        with self.assertRaises(ConfigurationError):
            resolve_groups(self.grouping, 'missing')
        with self.assertRaises(ConfigurationError):
            resolve_groups(self.grouping, ['xyz_Latn'])

    def test_low_performing_threshold(self):
        self.assertEqual(classify_low_performing({'a': 0.59, 'b': 0.6}), {'a'})
        self.assertEqual(classify_low_performing({'a': 0.59, 'b': 0.6}, 0.7), {'a', 'b'})

    def test_supervised_targets(self):
        targets = select_supervised_targets(self.grouping, n_per_group=1, rng=SeededRng(0),
                                            exclude={'eng_Latn', 'deu_Latn'})
        self.assertEqual(len(targets), 2)
        self.assertEqual(targets[0], 'zho_Hans')
        self.assertIn(targets[1], {'fon_Latn', 'quy_Latn'})

    def test_default_source_sets_are_nested(self):
        sets = default_source_sets([f'l{index}' for index in range(9)])
        self.assertEqual(len(sets['compact-3']), 3)
        self.assertEqual(len(sets['mid-7']), 7)
        self.assertEqual(sets['seen-all'][:7], sets['mid-7'])

    def test_malformed(self):
        path = os.path.join(self.tmp.name, 'bad.yaml')
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write('languages:\n  eng_Latn: {reference_accuracy: 0.5}\n')
        with self.assertRaises(FormatError):
            load_grouping(path)
        with self.assertRaises(CacheIOError):
            load_grouping(os.path.join(self.tmp.name, 'missing.yaml'))
