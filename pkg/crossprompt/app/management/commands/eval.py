from crossprompt.app.evaluation.evaluate import evaluate
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models import load_cached_prompt, load_state
from crossprompt.app.tasks.campaigns import prepare_campaign
from crossprompt.app.tensor import SeededRng


class Command(ExperimentCommand):
    """
    Django management command for test-split accuracy through a prompt cache.

    The head comes from the state; the prompt comes from the cache file only.
    """

    help = 'Evaluate a cached prompt and a saved head on target languages'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--prompt', required=True, help='Prompt cache written by export-prompt')
        parser.add_argument('--state', required=True, help='State holding the classification head')
        parser.add_argument(
            '--targets', nargs='*', default=None,
            help='Target language ids (default: the configured targets, else every language)',
        )

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config)
        cached = load_cached_prompt(options['prompt'], context.backbone_config.d_model)
        model, _ = load_state(
            options['state'], context.backbone_config, context.stack, SeededRng(0).child('state')
        )
        grouping = context.suite.grouping
        targets = options['targets'] or config.targets or list(grouping.languages)
        accuracies = []
        for language in targets:
            accuracy = evaluate(context.stack, model.head, cached, context.suite.dataset(language))
            accuracies.append(accuracy)
            self.stdout.write('{}\t{:.4f}'.format(language, accuracy))
        self.stdout.write('mean\t{:.4f}'.format(sum(accuracies) / len(accuracies)))
