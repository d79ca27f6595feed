from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models import export_cached_prompt, load_state
from crossprompt.app.tasks.campaigns import prepare_campaign
from crossprompt.app.tensor import SeededRng


class Command(ExperimentCommand):
    """
    Django management command for assembling a saved state's prompt into a cache file.
    """

    help = 'Run the prompt encoder once over a saved state and write the prompt cache'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--state', required=True, help='State written by train-source')
        parser.add_argument('--output', required=True, help='Prompt cache path')

    def run(self, **options):
        config = self.load_config(options)
        context = prepare_campaign(config)
        model, metadata = load_state(
            options['state'], context.backbone_config, context.stack, SeededRng(0).child('state')
        )
        cached = export_cached_prompt(model.components, {
            'source_set': metadata.get('source_set', config.source_set_id),
            'seed': metadata.get('seed', 0),
            'creation_step': metadata.get('creation_step', 0),
        }, options['output'])
        self.stdout.write("Wrote {} prompt ({}x{}, checksum {}) to '{}'".format(
            cached.method, cached.length, cached.width, cached.checksum, options['output']
        ))
