import numpy as np
from django.core.management import CommandError

from crossprompt.app.constants import PAD_TOKEN_ID
from crossprompt.app.management.base import ExperimentCommand
from crossprompt.app.models import (
    ClassificationHead,
    EncoderStack,
    PromptComponents,
    PromptedClassifier,
)
from crossprompt.app.tensor import SeededRng, finite_diff_check, ops

TOY_VOCAB_SIZE = 64
TOY_CLASSES = 4


class Command(ExperimentCommand):
    """
    Django management command for checking reverse-mode gradients of a toy prompted model.

    Compares the gradients of every trainable tensor (standard prompt, pseudo
    prompt, encoder and head) against central differences.
    """

    help = 'Finite-difference check of the prompted classifier gradients'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--eps', type=float, default=1e-3, help='Central difference step')
        parser.add_argument('--tolerance', type=float, default=1e-3,
                            help='Largest accepted relative error')
        parser.add_argument('--samples', type=int, default=8,
                            help='Coordinates sampled per tensor')
        parser.add_argument('--batch-size', type=int, default=4)
        parser.add_argument('--seed', type=int, default=0)

    def run(self, **options):
        config = self.load_config(options)
        backbone = dict(config.backbone)
        backbone['vocab_size'] = backbone.get('vocab_size') or TOY_VOCAB_SIZE
        backbone['n_classes'] = backbone.get('n_classes') or TOY_CLASSES
        config = config.with_overrides(backbone=backbone)
        backbone_config = config.backbone_config()
        rng = SeededRng(options['seed']).child('gradcheck')

        stack = EncoderStack.initialize(backbone_config, rng.child('stack'))
        stack.freeze()
        head = ClassificationHead.initialize(backbone_config, rng.child('head'))
        method, fraction = config.parsed_method
        components = PromptComponents.build(
            method, fraction, config.prompt_length, backbone_config.d_model, config.bottleneck,
            rng.child('prompt'),
        )
        model = PromptedClassifier(backbone_config, stack, head, components)
        # zero-initialized tensors would leave the encoder's inner gradients identically zero
        for name, tensor in model.components.named_parameters() + model.head.named_parameters():
            if not np.any(tensor.values):
                tensor.values = rng.child('nudge', name).normal(tensor.shape, 0.02).astype(
                    tensor.values.dtype
                )

        batch_rng = rng.child('batch')
        length = max(1, min(8, backbone_config.max_positions - 1 - config.prompt_length))
        batch_size = options['batch_size']
        tokens = batch_rng.integers(2, backbone_config.vocab_size, size=(batch_size, length))
        mask = np.ones((batch_size, length), dtype=bool)
        mask[0, length // 2:] = False
        tokens[0, length // 2:] = PAD_TOKEN_ID
        mask[0, 0] = True
        labels = batch_rng.integers(0, backbone_config.n_classes, size=batch_size)

        def loss_fn():
            return ops.cross_entropy(model.logits(tokens, mask), labels)

        params = model.trainable_tensors()
        error = finite_diff_check(
            loss_fn, params, options['eps'], samples_per_param=options['samples'],
            rng=rng.child('coordinates'),
        )
        self.stdout.write('{} over {} tensors ({}): max relative error {:.3e}'.format(
            model.label, len(params), ', '.join(tensor.name for tensor in params), error
        ))
        if not error < options['tolerance']:
            raise CommandError(
                'gradient check failed: relative error {:.3e} >= {:.1e}'.format(
                    error, options['tolerance']
                )
            )
