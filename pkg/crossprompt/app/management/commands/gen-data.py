from crossprompt.app.data.suites import SyntheticSuiteConfig, build_synthetic_suite, write_suite
from crossprompt.app.management.base import ExperimentCommand


class Command(ExperimentCommand):
    """
    Django management command for generating a synthetic benchmark suite.

    Example:

    gen-data --output data/desk --set data.synthetic.seed=3
    """

    help = 'Generate a synthetic language family and write it as TSV files with a grouping'
    config_required = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--output', required=True, help='Directory for the TSV files')

    def run(self, **options):
        document = self.load_document(options)
        suite_config = SyntheticSuiteConfig.from_dict(
            (document.get('data') or {}).get('synthetic')
        )
        suite = build_synthetic_suite(suite_config)
        write_suite(suite, options['output'], suite_config)
        grouping = suite.grouping
        self.stdout.write(
            "Wrote {} languages ({} seen, {} unseen) to '{}'".format(
                len(suite.datasets), len(grouping.seen), len(grouping.unseen), options['output']
            )
        )
