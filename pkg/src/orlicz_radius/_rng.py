"""Counter-based random streams.

A stream is identified by ``(seed, tag)``: the pair is hashed into a 128-bit
Philox key and the Philox counter plays the role of the entry position.  No
generator state is shared between streams, so draws can be produced in any
order, by any number of workers, with identical results.
"""

from __future__ import annotations

import hashlib

import numpy as np

_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0


def stream_key(seed: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{int(seed)}|{tag}".encode(), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def raw_words(seed: int, tag: str, count: int) -> np.ndarray:
    gen = np.random.Philox(key=stream_key(seed, tag))
    return gen.random_raw(count)


def uniforms(seed: int, tag: str, count: int) -> np.ndarray:
    """``count`` doubles in ``(0, 1]`` built from the top 53 bits of each word."""
    words = raw_words(seed, tag, count)
    return ((words >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_2_53


def complex_gaussians(seed: int, tag: str, count: int) -> np.ndarray:
    """Standard complex Gaussians (``E|z|^2 = 1``) by Box-Muller.

    Entry ``k`` consumes counter words ``2k`` and ``2k + 1``.
    """
    u = uniforms(seed, tag, 2 * count)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = _TWO_PI * u[1::2]
    return (radius * np.cos(angle) + 1j * radius * np.sin(angle)) / np.sqrt(2.0)
