from crossprompt.app.data.suites import load_suite
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models.accounting import count_specs, reference_parameter_specs


class Command(ExperimentCommand):
    """
    Django management command for exact parameter accounting.

    Counts come from tensor shapes only, so reference shapes need no memory.
    """

    help = 'Print total and trainable parameter counts of the configured method'

    def run(self, **options):
        config = self.load_config(options)
        suite = None
        if config.backbone.get('vocab_size') is None or config.backbone.get('n_classes') is None:
            suite = load_suite(config.data)
        backbone_config = config.backbone_config(suite)
        method, fraction = config.parsed_method
        accounting = count_specs(
            reference_parameter_specs(
                backbone_config, method, fraction, config.prompt_length, config.bottleneck
            ),
            backbone_config.total_params_override,
        )
        for component, parameters, trainable in accounting.as_rows():
            self.stdout.write('{:<20}{:>16,}{:>16,}'.format(component, parameters, trainable))
        self.stdout.write('method={} trainable={:,} total={:,} fraction={:.6f} ({:.3%})'.format(
            config.method, accounting.trainable, accounting.total,
            accounting.trainable_fraction, accounting.trainable_fraction,
        ))
