import collections
import logging

from crossprompt.app.exceptions import ConfigurationError

log = logging.getLogger(__name__)

__all__ = ('Batch', 'sample_multisource_batch')

Batch = collections.namedtuple('Batch', ['examples', 'languages'])


def sample_multisource_batch(pools, batch_size, rng):
    """
    Draw ``batch_size`` examples uniformly from the union of ``pools``.

    ``pools`` maps language id to a list of examples. Draws are without
    replacement within a batch while the union is large enough, with
    replacement otherwise. The language of every example is kept.
    """
    union = [
        (language, example)
        for language, examples in pools.items() for example in examples
    ]
    if not union:
        raise ConfigurationError('every source pool is empty')
    replace = len(union) < batch_size
    picks = rng.choice(len(union), size=batch_size, replace=replace)
    chosen = [union[int(index)] for index in picks]
    return Batch(
        examples=[example for _, example in chosen],
        languages=[language for language, _ in chosen],
    )
