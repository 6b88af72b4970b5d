"""Seeded random streams shared by every stochastic component.

All randomness comes from numpy's PCG64 bit generator: a documented 64-bit
generator whose output for a given seed is identical on every platform. Each
component draws from its own stream, keyed by hashing ``(seed, *tags)``, so
adding a consumer never shifts the numbers another consumer sees.
"""

import hashlib

import numpy as np
from numpy.typing import NDArray

type Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(seed: int, *tags: str | int) -> int:
    """Hash a root seed and purpose tags into a 64-bit sub-seed."""
    payload = "\x1f".join(str(part) for part in (seed, *tags)).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()

    return int.from_bytes(digest, "big")


def derive_rng(seed: int, *tags: str | int) -> Rng:
    return make_rng(derive_seed(seed, *tags))


def spawn_seed(rng: Rng) -> int:
    """Draw a fresh 63-bit seed from an existing stream."""
    return int(rng.integers(0, 2**63 - 1))


def standard_normal(rng: Rng, size: int | tuple[int, ...]) -> NDArray[np.float64]:
    """Standard Gaussian draws by the Box-Muller transform on ``rng``'s uniforms."""
    count = int(np.prod(size))
    pairs = (count + 1) // 2

    # 1 - U keeps the argument of log inside (0, 1]
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    samples = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])

    return samples[:count].reshape(size)
