"""Weight container files.

A container is a safetensors file: a JSON header listing every tensor's
name, shape, dtype and byte offsets, followed by the raw little-endian
float32 payload. String metadata rides in the header.
"""
import json
import logging
import os

import numpy as np
from safetensors import SafetensorError, safe_open
from safetensors import numpy as safetensors_numpy

from crossprompt.app.exceptions import CacheIOError, IntegrityError

log = logging.getLogger(__name__)


def _contiguous(arrays):
    return {
        name: np.ascontiguousarray(array, dtype='<f4') for name, array in arrays.items()
    }


def serialize(arrays, metadata=None):
    return safetensors_numpy.save(_contiguous(arrays), metadata=metadata)


def save_weights(arrays, path, metadata=None):
    metadata = {key: str(value) for key, value in (metadata or {}).items()}
    directory = os.path.dirname(os.fspath(path))
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        safetensors_numpy.save_file(_contiguous(arrays), os.fspath(path), metadata=metadata)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    log.debug('Wrote %d tensors to %s', len(arrays), path)


def load_weights(path):
    """Return ``(arrays, metadata)`` from a container file."""
    if not os.path.exists(path):
        raise CacheIOError(path, 'no such file')
    try:
        with safe_open(os.fspath(path), framework='np') as handle:
            metadata = dict(handle.metadata() or {})
            arrays = {name: handle.get_tensor(name) for name in handle.keys()}
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    except (SafetensorError, ValueError, RuntimeError) as exc:
        raise IntegrityError(f'{path}: unreadable weight container ({exc})')
    return arrays, metadata


def encode_json(value):
    return json.dumps(value, sort_keys=True)


def decode_json(text):
    return json.loads(text)
