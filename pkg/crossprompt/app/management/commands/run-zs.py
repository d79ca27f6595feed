from crossprompt.app.management.base import ExperimentCommand, write_group_summary
from crossprompt.app.tasks.campaigns import prepare_campaign, run_zero_shot


class Command(ExperimentCommand):
    """
    Django management command for the zero-shot campaign.

    Example:

    run-zs --config configs/desk-zero-shot.yaml --set seeds=[7]
    """

    help = 'Train on the source set and evaluate every target without target supervision'

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config)
        results = run_zero_shot(config, context=context)
        self.stdout.write("Wrote {} results to '{}'".format(
            len(results), config.resolved_output_dir()
        ))
        write_group_summary(self.stdout, results, context.suite.grouping)
