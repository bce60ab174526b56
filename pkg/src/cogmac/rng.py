"""Counter-based random streams, one per simulated slot.

Slot ``s`` of a run keyed by ``key`` draws from a Philox generator whose
counter starts at ``(0, 0, 0, s)``. The draws of a slot therefore depend
only on ``(key, s)``, never on how slots are split between workers or
chunks.
"""

import numpy as np


def stream_key(seed, *path) -> int:
    """128-bit Philox key derived from ``seed`` and an optional integer path."""
    words = np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(2, np.uint64)
    return int(words[0]) | (int(words[1]) << 64)


def slot_stream(key: int, slot: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, slot]))


class SlotStreams:
    """Reusable generator that is repositioned at the start of each slot.

    Equivalent to :func:`slot_stream` but avoids building a new bit generator
    per slot. The returned generator is shared; use it before asking for the
    next slot.
    """

    def __init__(self, key: int):
        self._bitgen = np.random.Philox(key=key)
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state

    def __call__(self, slot: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"] = np.array([0, 0, 0, slot], dtype=np.uint64)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen
