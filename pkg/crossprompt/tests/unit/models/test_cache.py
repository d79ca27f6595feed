import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from crossprompt.app.constants import PromptMethod
from crossprompt.app.exceptions import CacheIOError, CompatibilityError, IntegrityError
from crossprompt.app.models import (
    PromptComponents,
    export_cached_prompt,
    load_cached_prompt,
)
from crossprompt.app.models import snapshots
from crossprompt.app.models.cache import PROMPT_TENSOR
from crossprompt.app.tensor import SeededRng


class TestCachedPrompt(SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.components = PromptComponents.build(PromptMethod.XPE, 1.0, 4, 8, 3, SeededRng(0))
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'prompt.safetensors')

    def tearDown(self):
        self.tmp.cleanup()
        super().tearDown()

    def _export(self):
        return export_cached_prompt(
            self.components, {'source_set': 'compact-3', 'seed': 2, 'creation_step': 40},
            self.path,
        )

    def test_export_and_load(self):
        cached = self._export()
        loaded = load_cached_prompt(self.path, d_model=8)
        np.testing.assert_array_equal(loaded.matrix, cached.matrix)
        self.assertEqual(loaded.metadata(), cached.metadata())
        self.assertEqual(loaded.method, 'XPE')
        self.assertEqual((loaded.length, loaded.width), (4, 8))

    def test_cache_holds_only_the_prompt(self):
        self._export()
        arrays, _ = snapshots.load_weights(self.path)
        self.assertEqual(list(arrays), [PROMPT_TENSOR])

    def test_matrix_is_read_only(self):
        cached = self._export()
        with self.assertRaises(ValueError):
            cached.matrix[0, 0] = 1.0

    def test_width_mismatch(self):
        self._export()
        with self.assertRaises(CompatibilityError):
            load_cached_prompt(self.path, d_model=16)

    def test_checksum_mismatch(self):
        self._export()
        arrays, metadata = snapshots.load_weights(self.path)
        arrays[PROMPT_TENSOR] = arrays[PROMPT_TENSOR] * 2.0 + 1.0
        snapshots.save_weights(arrays, self.path, metadata)
        with self.assertRaises(IntegrityError):
            load_cached_prompt(self.path)

    def test_missing_file(self):
        with self.assertRaises(CacheIOError):
            load_cached_prompt(os.path.join(self.tmp.name, 'missing.safetensors'))
