"""
Utility module.
"""
import numpy as np

from .doc import doc_category


__all__ = (
    "make_generator",
    "RNG_ALGORITHM",
)


RNG_ALGORITHM = "numpy.random.Philox (4x64, 10 rounds) seeded by SeedSequence(entropy=seed, spawn_key=(stream, index))"


@doc_category("Utilities")
def make_generator(seed: int, stream: int = 0, index: int = 0) -> np.random.Generator:
    """
    Returns the random generator of sample ``index`` in stream ``stream``.

    Generators are independent counter-based Philox streams, derived only from
    ``(seed, stream, index)``, so samples can be drawn in any order or in parallel
    and still reproduce the same values.

    Parameters
    ------------
    seed: int
        64-bit unsigned seed.
    stream: int
        Identifier of the consumer (a check or a command).
    index: int
        Sample index inside the stream.
    """
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}.")

    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(sequence))
