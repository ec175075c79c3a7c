"""Counter-based splittable random number streams.

Each stream is keyed by a (master_seed, stream_id) pair fed into a Philox
counter-based generator, so replicas are reproducible independent of
scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

_U64 = 1 << 64


@dataclass
class RngStream:
    master_seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, int) or not -_U64 < v < _U64:
                raise ParameterError(f"{name} must be a 64-bit integer, got {v!r}")

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            key = (self.master_seed % _U64) * _U64 + (self.stream_id % _U64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, stream_id: int) -> "RngStream":
        """A fresh stream with the same master seed and a new id."""
        return RngStream(self.master_seed, stream_id)
