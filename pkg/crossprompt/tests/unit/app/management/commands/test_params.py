import os
from io import StringIO

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from .base import CONFIGS_DIR


class TestParamsCommand(SimpleTestCase):
    def test_reference_shape(self):
        out = StringIO()
        call_command('params', '--config', os.path.join(CONFIGS_DIR, 'reference-shape.yaml'),
                     stdout=out)
        output = out.getvalue()
        self.assertIn('method=XPE trainable=1,602,823 total=550,000,000', output)
        self.assertIn('fraction=0.002914', output)

    def test_spt_override(self):
        out = StringIO()
        call_command('params', '--config', os.path.join(CONFIGS_DIR, 'reference-shape.yaml'),
                     '--set', 'method=SPT', stdout=out)
        # 20 prompt rows plus the head
        self.assertIn('trainable={:,}'.format(20 * 1024 + 1056775), out.getvalue())

    def test_config_required(self):
        with self.assertRaisesMessage(
            CommandError, 'Error: the following arguments are required: --config'
        ):
            call_command('params')

    def test_invalid_config(self):
        with self.assertRaisesRegex(CommandError, 'method'):
            call_command('params', '--config', os.path.join(CONFIGS_DIR, 'reference-shape.yaml'),
                         '--set', 'method=DUAL-900', stdout=StringIO())
