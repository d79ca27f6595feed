from crossprompt.app.management.base import ExperimentCommand, write_group_summary
from crossprompt.app.tasks.campaigns import prepare_campaign, run_sequential


class Command(ExperimentCommand):
    """
    Django management command for the sequential campaign: source phase, then one target.
    """

    help = 'Train on the source set, adapt to each target language and evaluate'

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config)
        results = run_sequential(config, context=context)
        self.stdout.write("Wrote {} results to '{}'".format(
            len(results), config.resolved_output_dir()
        ))
        write_group_summary(self.stdout, results, context.suite.grouping)
