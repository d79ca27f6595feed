import logging
import os

import yaml
from django.core.management import BaseCommand, CommandError

from crossprompt.app.data.grouping import load_grouping
from crossprompt.app.data.suites import GROUPING_FILE, load_suite
from crossprompt.app.evaluation.aggregate import aggregate
from crossprompt.app.exceptions import CacheIOError, ConfigurationError, CrossPromptError
from crossprompt.app.serializers.config import apply_overrides, load_experiment_config

log = logging.getLogger('crossprompt')

VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG, 3: logging.DEBUG}


class ExperimentCommand(BaseCommand):
    """
    Base for commands driven by an experiment configuration file.

    Every subclass accepts ``--config PATH`` and any number of
    ``--set key.path=value`` overrides, and implements ``run``. Errors of the
    crossprompt hierarchy become ``CommandError`` with the message as diagnostic.
    """

    config_required = True

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            required=self.config_required,
            help='Experiment configuration (YAML)',
        )
        parser.add_argument(
            '--set',
            dest='overrides',
            action='append',
            default=[],
            metavar='KEY.PATH=VALUE',
            help='Override a configuration value; may be repeated',
        )

    def load_config(self, options):
        return load_experiment_config(options.get('config'), options.get('overrides') or ())

    def load_document(self, options):
        """The overridden configuration document, without validation."""
        document = {}
        path = options.get('config')
        if path:
            try:
                with open(path, encoding='utf-8') as handle:
                    document = yaml.safe_load(handle) or {}
            except OSError as exc:
                raise CacheIOError(path, exc.strerror or str(exc))
            except yaml.YAMLError as exc:
                raise ConfigurationError(f'{path}: invalid YAML ({exc})')
        return apply_overrides(document, options.get('overrides') or ())

    def output_path(self, config, option, default_name):
        path = option or os.path.join(config.resolved_output_dir(), default_name)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        return path

    def handle(self, *args, **options):
        log.setLevel(VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.INFO))
        try:
            return self.run(**options)
        except CrossPromptError as exc:
            raise CommandError(str(exc))

    def run(self, **options):
        raise NotImplementedError


def write_group_summary(stdout, results, grouping):
    """One line per (cell, target group): mean and standard deviation across seeds, in percent."""
    if not results:
        stdout.write('No results; every seed failed')
        return
    for item in aggregate(results, grouping):
        if item.is_empty:
            stdout.write('{}\t{}\t--'.format(item.column, item.group))
        else:
            stdout.write('{}\t{}\t{:.1f} +- {:.1f}'.format(
                item.column, item.group, 100 * item.mean, 100 * item.std
            ))


def resolve_grouping(config, grouping_path=None):
    """The grouping named on the command line, in the data section, or built with the suite."""
    if grouping_path:
        return load_grouping(grouping_path)
    data = config.data or {}
    if data.get('grouping'):
        return load_grouping(data['grouping'])
    if data.get('tsv_dir'):
        return load_grouping(os.path.join(data['tsv_dir'], GROUPING_FILE))
    return load_suite(data).grouping
