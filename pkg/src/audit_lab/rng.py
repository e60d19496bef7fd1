"""Seeded random streams.

Every stochastic operation in the library takes an explicit ``RngStream``,
so any run is a pure function of (inputs, seed).  A stream is single-owner:
parallel work must ``split`` it into independent child streams, never share
one across workers.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """A named, seeded wrapper around ``numpy.random.Generator``.

    Identical seed + identical call sequence => identical outputs.
    """

    __slots__ = ("seed", "_seq", "np")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._seq = np.random.SeedSequence(self.seed)
        self.np = np.random.Generator(np.random.PCG64(self._seq))

    def split(self, n: int) -> list["RngStream"]:
        """Spawn ``n`` independent child streams (consumes spawn state)."""
        children = self._seq.spawn(n)
        out = []
        for child in children:
            s = object.__new__(RngStream)
            s.seed = child.entropy if isinstance(child.entropy, int) else self.seed
            s._seq = child
            s.np = np.random.Generator(np.random.PCG64(child))
            out.append(s)
        return out

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed})"


def derive_seed(base_seed: int, *tags: object) -> int:
    """Stable 63-bit seed derived from a base seed and hashable tags.

    Used by the harness to give every (sweep point, seed) cell its own
    stream without collisions.
    """
    import hashlib

    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(base_seed)).encode())
    for t in tags:
        h.update(b"\x1f")
        h.update(repr(t).encode())
    return int.from_bytes(h.digest(), "big") >> 1
