"""Exported soft prompts.

The cache holds only the assembled L×d matrix; the pseudo prompt and the
encoder weights stay behind. The header metadata carries the method, the
shape, the provenance fields and a CRC-64 over the little-endian float32
payload.
"""
import dataclasses
import logging

import numpy as np

from crossprompt.app.common.checksums import crc64
from crossprompt.app.exceptions import CompatibilityError, FormatError, IntegrityError
from crossprompt.app.tensor import Tensor

from . import snapshots

log = logging.getLogger(__name__)

__all__ = (
    'CachedPrompt',
    'export_cached_prompt',
    'load_cached_prompt',
)

PROMPT_TENSOR = 'prompt'
METADATA_FIELDS = ('method', 'L', 'd', 'source_set', 'seed', 'creation_step', 'checksum')


def _payload(matrix):
    return np.ascontiguousarray(matrix, dtype='<f4').tobytes()


@dataclasses.dataclass(frozen=True)
class CachedPrompt:
    """
    Static soft prompt ready to be prepended at inference time.

    Fields:
        matrix: Read-only L×d float32 array.
        method: Method label (SPT, XPE, DUAL-<pct>).
        source_set: Identifier of the source languages the prompt was trained on.
        seed: Run seed.
        creation_step: Optimizer step of the exported state.
        checksum: CRC-64 of the payload, 16 hex digits.
    """

    matrix: np.ndarray
    method: str
    source_set: str
    seed: int
    creation_step: int
    checksum: str

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def length(self):
        return self.matrix.shape[0]

    @property
    def width(self):
        return self.matrix.shape[1]

    def metadata(self):
        return {
            'method': self.method,
            'L': self.length,
            'd': self.width,
            'source_set': self.source_set,
            'seed': self.seed,
            'creation_step': self.creation_step,
            'checksum': self.checksum,
        }

    def as_tensor(self):
        """Constant (non-trainable) tensor view for injection."""
        return Tensor(self.matrix, name='prompt.cached')

    def check_width(self, d_model):
        if self.width != d_model:
            raise CompatibilityError(
                f'cached prompt width {self.width} does not match backbone d_model {d_model}'
            )


def export_cached_prompt(components, metadata, path):
    """
    Assemble the prompt once and write it to ``path``.

    ``metadata`` supplies ``source_set``, ``seed`` and ``creation_step``;
    method, shape and checksum are derived. Returns the ``CachedPrompt``.
    """
    matrix = np.array(components.assemble().values, dtype=np.float32)
    cached = CachedPrompt(
        matrix=matrix,
        method=components.label,
        source_set=str(metadata.get('source_set', '')),
        seed=int(metadata.get('seed', 0)),
        creation_step=int(metadata.get('creation_step', 0)),
        checksum=crc64(_payload(matrix)),
    )
    snapshots.save_weights({PROMPT_TENSOR: matrix}, path, cached.metadata())
    log.info('Exported %s prompt (%d×%d) to %s', cached.method, cached.length, cached.width, path)
    return cached


def load_cached_prompt(path, d_model=None):
    arrays, metadata = snapshots.load_weights(path)
    missing = [field for field in METADATA_FIELDS if field not in metadata]
    if PROMPT_TENSOR not in arrays or missing:
        raise FormatError(f'{path}: not a prompt cache (missing {missing or [PROMPT_TENSOR]})')
    matrix = np.array(arrays[PROMPT_TENSOR], dtype=np.float32)
    shape = (int(metadata['L']), int(metadata['d']))
    if matrix.shape != shape:
        raise IntegrityError(f'{path}: payload shape {matrix.shape} disagrees with header {shape}')
    if crc64(_payload(matrix)) != metadata['checksum']:
        raise IntegrityError(f'{path}: prompt checksum mismatch')
    cached = CachedPrompt(
        matrix=matrix,
        method=metadata['method'],
        source_set=metadata['source_set'],
        seed=int(metadata['seed']),
        creation_step=int(metadata['creation_step']),
        checksum=metadata['checksum'],
    )
    if d_model is not None:
        cached.check_width(d_model)
    return cached
