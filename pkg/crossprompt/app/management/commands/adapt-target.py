import os

from crossprompt.app.common.records import training_log
from crossprompt.app.constants import Supervision
from crossprompt.app.evaluation.evaluate import evaluate
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models import export_cached_prompt, load_state
from crossprompt.app.tasks.campaigns import prepare_campaign, source_datasets
from crossprompt.app.tasks.training import adapt_target
from crossprompt.app.tensor import SeededRng


class Command(ExperimentCommand):
    """
    Django management command for adapting a source-phase state to one target language.

    Example:

    adapt-target --config run.yaml --state runs/src.safetensors --target syn-u02
    """

    help = 'Continue training a saved source-phase state on one target language'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--state', required=True, help='State written by train-source')
        parser.add_argument('--target', required=True, help='Target language id')
        parser.add_argument('--seed', type=int, help='Run seed (default: the state seed)')
        parser.add_argument('--save-state', help='Write the adapted prompt components and head')
        parser.add_argument('--export', help='Write the adapted prompt cache')

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config)
        dataset = context.suite.dataset(options['target'])
        model, metadata = load_state(
            options['state'], context.backbone_config, context.stack, SeededRng(0).child('state')
        )
        seed = options['seed']
        if seed is None:
            seed = int(metadata.get('seed', config.seeds_for(Supervision.SEQUENTIAL)[0]))
        rng = SeededRng(seed)
        name = f'adapt-target__{model.label}__{dataset.language}__seed{seed}'
        log_path = self.output_path(config, None, os.path.join('logs', f'{name}.jsonl'))
        with training_log(log_path, seed=seed) as records:
            outcome = adapt_target(model, dataset, config.target_phase, rng, records,
                                   sources=source_datasets(config, context.suite))
        prompt_path = options['export'] or self.output_path(
            config, None, os.path.join('prompts', f'{name}.safetensors')
        )
        cached = export_cached_prompt(
            model.components,
            {'source_set': f"{metadata.get('source_set', config.source_set_id)}>{dataset.language}",
             'seed': seed, 'creation_step': outcome.best_step},
            prompt_path,
        )
        accuracy = evaluate(context.stack, model.head, cached, dataset)
        self.stdout.write(
            "Adapted {} to {} in {} steps; test accuracy {:.4f}".format(
                model.label, dataset.language, outcome.steps, accuracy
            )
        )
        if options['save_state']:
            model.save_state(options['save_state'], {
                'source_set': cached.source_set, 'seed': seed, 'creation_step': outcome.best_step,
            })
            self.stdout.write("Wrote state to '{}'".format(options['save_state']))
