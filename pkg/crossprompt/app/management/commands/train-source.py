import os

from crossprompt.app.common.records import training_log
from crossprompt.app.constants import Supervision
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models import export_cached_prompt
from crossprompt.app.tasks.campaigns import build_model, prepare_campaign, source_datasets
from crossprompt.app.tasks.training import train_source
from crossprompt.app.tensor import SeededRng


class Command(ExperimentCommand):
    """
    Django management command for one multi-source training run.

    Example:

    train-source --config configs/desk-zero-shot.yaml --seed 7 --save-state runs/src.safetensors
    """

    help = 'Train the configured prompt on the source set for one seed'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--seed', type=int, help='Run seed (default: first configured seed)')
        parser.add_argument('--save-state', help='Write the trained prompt components and head')
        parser.add_argument('--export', help='Write the assembled prompt cache')

    def run(self, **options):
        config = self.load_config(options)
        seed = options['seed']
        if seed is None:
            seed = config.seeds_for(Supervision.ZERO_SHOT)[0]
        context = prepare_campaign(config)
        sources = source_datasets(config, context.suite)
        rng = SeededRng(seed)
        model = build_model(config, context, rng)
        log_path = self.output_path(
            config, None, os.path.join('logs', f'train-source__{config.method}__seed{seed}.jsonl')
        )
        with training_log(log_path, seed=seed) as records:
            outcome = train_source(model, sources, config.source_phase, rng, records)
        self.stdout.write(
            "Trained {} on {} for {} steps; best validation accuracy {:.4f} at step {}".format(
                model.label, config.source_set_id, outcome.steps, outcome.best_val_acc,
                outcome.best_step,
            )
        )
        if options['save_state']:
            model.save_state(options['save_state'], {
                'source_set': config.source_set_id,
                'seed': seed,
                'creation_step': outcome.best_step,
            })
            self.stdout.write("Wrote state to '{}'".format(options['save_state']))
        if options['export']:
            export_cached_prompt(
                model.components,
                {'source_set': config.source_set_id, 'seed': seed,
                 'creation_step': outcome.best_step},
                options['export'],
            )
            self.stdout.write("Wrote prompt cache to '{}'".format(options['export']))
