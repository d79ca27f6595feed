import glob
import os
from io import StringIO

from django.core.management import CommandError, call_command

from crossprompt.app.serializers import read_run_results

from .base import CommandTestCase


class TestCampaignCommands(CommandTestCase):
    def test_run_zs(self):
        out = StringIO()
        call_command('run-zs', '--config', self.write_config(), stdout=out)
        output = out.getvalue()
        self.assertIn("Wrote 2 results to '{}'".format(self.output_dir), output)
        self.assertIn('DUAL-50 / compact-3\tUnseen\t', output)
        self.assertEqual(len(read_run_results(self.output_dir)), 2)

        out = StringIO()
        call_command('report', '--results', self.output_dir, '--format', 'markdown-table',
                     stdout=out)
        self.assertIn('Wrote markdown-table report of 2 results', out.getvalue())
        self.assertTrue(os.path.exists(os.path.join(self.output_dir, 'report.md')))

        call_command('report', '--results', self.output_dir, '--by-language', stdout=StringIO())
        self.assertTrue(os.path.exists(os.path.join(self.output_dir, 'report-languages.csv')))

    def test_run_seq(self):
        out = StringIO()
        call_command('run-seq', '--config', self.write_config(targets=['syn-u01']), stdout=out)
        self.assertIn('Wrote 1 results', out.getvalue())
        result, = read_run_results(self.output_dir)
        self.assertEqual(result.supervision, 'sequential')
        self.assertEqual(result.target, 'syn-u01')

    def test_sweep(self):
        config = self.write_config(sweep={'methods': ['SPT', 'XPE'], 'source_sets': ['compact-3']})
        out = StringIO()
        call_command('sweep', '--config', config, stdout=out)
        self.assertIn('Wrote 4 results', out.getvalue())
        self.assertTrue(os.path.exists(os.path.join(self.output_dir, 'sweep-report.md')))
        self.assertTrue(os.path.exists(os.path.join(self.output_dir, 'sweep-languages.md')))

    def test_step_by_step(self):
        config = self.write_config()
        backbone = os.path.join(self.output_dir, 'backbone.safetensors')
        call_command('pretrain', '--config', config, '--output', backbone, stdout=StringIO())
        config = self.write_config(backbone_snapshot=backbone)

        state = os.path.join(self.output_dir, 'source.safetensors')
        out = StringIO()
        call_command('train-source', '--config', config, '--save-state', state, stdout=out)
        self.assertIn('Trained DUAL-50 on compact-3', out.getvalue())
        self.assertTrue(glob.glob(os.path.join(self.output_dir, 'logs', 'train-source__*')))

        prompt = os.path.join(self.output_dir, 'source-prompt.safetensors')
        out = StringIO()
        call_command('export-prompt', '--config', config, '--state', state, '--output', prompt,
                     stdout=out)
        self.assertIn('Wrote DUAL-50 prompt (4x8', out.getvalue())

        out = StringIO()
        call_command('eval', '--config', config, '--prompt', prompt, '--state', state,
                     '--targets', 'syn-u00', 'syn-u01', stdout=out)
        lines = out.getvalue().splitlines()
        self.assertEqual([line.split('\t')[0] for line in lines], ['syn-u00', 'syn-u01', 'mean'])

        out = StringIO()
        call_command('adapt-target', '--config', config, '--state', state,
                     '--target', 'syn-u00', stdout=out)
        self.assertIn('Adapted DUAL-50 to syn-u00', out.getvalue())
        self.assertTrue(glob.glob(os.path.join(self.output_dir, 'prompts', 'adapt-target__*')))

    def test_report_without_results(self):
        with self.assertRaisesRegex(CommandError, 'no result files'):
            call_command('report', '--config', self.write_config(), stdout=StringIO())

    def test_report_without_config(self):
        with self.assertRaisesRegex(CommandError, 'config.yaml'):
            call_command('report', '--results', self.output_dir, stdout=StringIO())
