import os

from crossprompt.app.constants import ReportFormat
from crossprompt.app.evaluation.aggregate import aggregate
from crossprompt.app.evaluation.reports import REPORT_EXTENSIONS, emit_language_report, emit_report
from crossprompt.app.exceptions import ConfigurationError
from crossprompt.app.management.base import ExperimentCommand, resolve_grouping
from crossprompt.app.serializers.config import load_experiment_config
from crossprompt.app.serializers.results import read_run_results


class Command(ExperimentCommand):
    """
    Django management command for rendering result files as a group table.

    Example:

    report --results runs/desk-zero-shot --format markdown-table
    """

    help = 'Aggregate result files by target group and write a report'
    config_required = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--results', help='Result directory (default: the configured output_dir)'
        )
        parser.add_argument('--grouping', help='Grouping file (default: from the configuration)')
        parser.add_argument(
            '--format',
            dest='report_format',
            choices=[choice.value for choice in ReportFormat],
            default=ReportFormat.CSV.value,
        )
        parser.add_argument('--output', help='Report path (default <results>/report.<ext>)')
        parser.add_argument(
            '--by-language', action='store_true',
            help='One row per target language instead of per target group',
        )
        parser.add_argument(
            '--strict', action='store_true',
            help='Fail on result files that are not valid run results instead of skipping them',
        )

    def run(self, **options):
        results_dir = options['results']
        if options['config']:
            config = self.load_config(options)
        elif results_dir and os.path.exists(os.path.join(results_dir, 'config.yaml')):
            config = load_experiment_config(
                os.path.join(results_dir, 'config.yaml'), options['overrides']
            )
        else:
            raise ConfigurationError('report needs --config or a result directory with config.yaml')
        results_dir = results_dir or config.resolved_output_dir()
        results = read_run_results(results_dir, strict=options['strict'])
        if not results:
            raise ConfigurationError(f'no result files under {results_dir}')
        grouping = resolve_grouping(config, options['grouping'])
        report_format = ReportFormat(options['report_format'])
        stem = 'report-languages' if options['by_language'] else 'report'
        path = options['output'] or os.path.join(
            results_dir, f'{stem}.{REPORT_EXTENSIONS[report_format]}'
        )
        if options['by_language']:
            emit_language_report(results, grouping, report_format, path, config.raw)
        else:
            emit_report(aggregate(results, grouping), report_format, path, config.raw)
        self.stdout.write("Wrote {} report of {} results to '{}'".format(
            report_format.value, len(results), path
        ))
