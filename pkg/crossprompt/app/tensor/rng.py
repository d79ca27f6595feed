import numpy as np

from crossprompt.app.common.checksums import crc64


class SeededRng:
    """
    Deterministic random stream.

    Backed by numpy's PCG64 bit generator, whose output for a given seed does
    not depend on the host platform. ``child`` derives independent streams
    (per language, per phase) from the same root seed.
    """

    def __init__(self, seed, *, stream=()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream = tuple(stream)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self):
        return f'<SeededRng seed={self.seed} stream={self.stream}>'

    @property
    def generator(self):
        return self._generator

    @property
    def state(self):
        return self._generator.bit_generator.state

    def child(self, *keys):
        return SeededRng(self.seed, stream=self.stream + tuple(_stream_key(k) for k in keys))

    def normal(self, shape, std=1.0):
        return (self._generator.standard_normal(shape) * std).astype(np.float32)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def random(self, size=None):
        return self._generator.random(size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size=size)

    def choice(self, population, size=None, replace=True, p=None):
        return self._generator.choice(population, size=size, replace=replace, p=p)

    def permutation(self, n):
        return self._generator.permutation(n)


def _stream_key(key):
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return int(crc64(str(key).encode('utf-8')), 16) & 0xFFFFFFFF
