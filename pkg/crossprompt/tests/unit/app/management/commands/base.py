import os

import yaml

import crossprompt
from crossprompt.tests.unit.base import TinyExperimentTestCase, tiny_document

CONFIGS_DIR = os.path.join(os.path.dirname(os.path.dirname(crossprompt.__file__)), 'configs')


class CommandTestCase(TinyExperimentTestCase):
    """Writes the tiny experiment as a YAML file for ``--config``."""

    def write_config(self, **changes):
        changes.setdefault('output_dir', self.output_dir)
        path = os.path.join(self.output_dir, 'tiny.yaml')
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(tiny_document(**changes), handle, sort_keys=False)
        return path
