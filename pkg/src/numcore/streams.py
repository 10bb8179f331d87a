"""Reproducible, independent random streams for replicate-parallel simulation."""
from typing import Tuple

import numpy as np

UINT64_MAX = (1 << 64) - 1


class RngStream:
    """
    A random stream identified by (base_seed, stream_id).

    The generator is Philox (counter based) keyed through numpy's SeedSequence,
    so streams with distinct stream ids are independent by construction and a
    given (base_seed, stream_id, substream) always yields the same sequence.
    """

    __slots__ = ("base_seed", "stream_id", "substream", "_generator")

    def __init__(self, base_seed: int, stream_id: int = 0, substream: Tuple[int, ...] = ()):
        for name, value in (("base_seed", base_seed), ("stream_id", stream_id)):
            if not 0 <= int(value) <= UINT64_MAX:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")
        self.base_seed = int(base_seed)
        self.stream_id = int(stream_id)
        self.substream = tuple(int(s) for s in substream)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            seq = np.random.SeedSequence(
                entropy=self.base_seed,
                spawn_key=(self.stream_id, *self.substream),
            )
            self._generator = np.random.Generator(np.random.Philox(seq))
        return self._generator

    def spawn(self, key: int) -> "RngStream":
        """Child stream, independent of the parent and of its siblings."""
        return RngStream(self.base_seed, self.stream_id, self.substream + (int(key),))

    def __getstate__(self):
        return {"base_seed": self.base_seed, "stream_id": self.stream_id, "substream": self.substream}

    def __setstate__(self, state):
        self.base_seed = state["base_seed"]
        self.stream_id = state["stream_id"]
        self.substream = tuple(state["substream"])
        self._generator = None

    def __repr__(self) -> str:
        sub = f", substream={self.substream}" if self.substream else ""
        return f"RngStream(base_seed={self.base_seed}, stream_id={self.stream_id}{sub})"
