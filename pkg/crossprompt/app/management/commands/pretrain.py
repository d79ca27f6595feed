from crossprompt.app.data.suites import load_suite
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.tasks.campaigns import BACKBONE_FILE, pretraining_languages
from crossprompt.app.tasks.pretraining import pretrain_backbone


class Command(ExperimentCommand):
    """
    Django management command for pretraining and freezing the backbone.

    The snapshot can be named as ``backbone_snapshot`` in later runs. Suites without
    pretraining corpora pretrain on the seen languages of the configured source set.
    """

    help = 'Pretrain the surrogate backbone on the seen languages and write a frozen snapshot'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--output', help='Snapshot path (default <output_dir>/backbone.safetensors)'
        )
        parser.add_argument('--steps', type=int, help='Pretraining steps')
        parser.add_argument('--seed', type=int, help='Pretraining seed')

    def run(self, **options):
        config = self.load_config(options)
        suite = load_suite(config.data)
        steps = options['steps'] or config.pretrain_steps
        stack, checksum = pretrain_backbone(
            config.backbone_config(suite), suite, steps=steps, seed=options['seed'],
            languages=pretraining_languages(suite, [config.sources]) or None,
        )
        path = self.output_path(config, options['output'], BACKBONE_FILE)
        stack.save(path)
        self.stdout.write("Wrote frozen backbone to '{}' (checksum {})".format(path, checksum))
