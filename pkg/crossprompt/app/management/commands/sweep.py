import os

from crossprompt.app.constants import ReportFormat
from crossprompt.app.evaluation.aggregate import aggregate
from crossprompt.app.evaluation.reports import REPORT_EXTENSIONS, emit_language_report, emit_report
from crossprompt.app.management.base import ExperimentCommand, write_group_summary
from crossprompt.app.tasks.campaigns import prepare_campaign, sweep


class Command(ExperimentCommand):
    """
    Django management command for the method x source set zero-shot grid.

    Example:

    sweep --config configs/desk-zero-shot.yaml --set sweep.methods=[SPT,XPE]
    """

    help = 'Run the zero-shot campaign for every configured method and source set'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--format',
            dest='report_format',
            choices=[choice.value for choice in ReportFormat],
            default=ReportFormat.MARKDOWN_TABLE.value,
        )

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config, source_sets=config.sweep_source_sets)
        results = sweep(config, context=context)
        grouping = context.suite.grouping
        write_group_summary(self.stdout, results, grouping)
        if not results:
            return
        output_dir = config.resolved_output_dir()
        report_format = ReportFormat(options['report_format'])
        extension = REPORT_EXTENSIONS[report_format]
        path = emit_report(aggregate(results, grouping), report_format,
                           os.path.join(output_dir, f'sweep-report.{extension}'), config.raw)
        emit_language_report(results, grouping, report_format,
                             os.path.join(output_dir, f'sweep-languages.{extension}'), config.raw)
        self.stdout.write("Wrote {} results and report '{}'".format(len(results), path))
