import os
from io import StringIO

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from .base import CONFIGS_DIR

TOY_CONFIG = os.path.join(CONFIGS_DIR, 'toy-gradcheck.yaml')


class TestGradcheckCommand(SimpleTestCase):
    def test_toy_model_passes(self):
        out = StringIO()
        call_command('gradcheck', '--config', TOY_CONFIG, stdout=out)
        output = out.getvalue()
        self.assertIn('DUAL-50 over', output)
        for name in ('prompt.standard', 'prompt.pseudo', 'encoder.down.weight'):
            self.assertIn(name, output)

    def test_xpe_only(self):
        out = StringIO()
        call_command('gradcheck', '--config', TOY_CONFIG, '--set', 'method=XPE', stdout=out)
        self.assertNotIn('prompt.standard', out.getvalue())

    def test_impossible_tolerance(self):
        with self.assertRaisesRegex(CommandError, 'gradient check failed'):
            call_command('gradcheck', '--config', TOY_CONFIG, '--tolerance', '0',
                         stdout=StringIO())
