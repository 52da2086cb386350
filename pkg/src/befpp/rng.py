"""Counter-based random streams.

Every variate is a pure function of (stream key, index, counter), so replicas can
run in any order or on any thread and still give identical samples.  The same
hash is implemented in the compiled core; both must stay in sync.
"""
from __future__ import annotations

import functools
import hashlib
import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
C_INDEX = 0xD1B54A32D192ED03
C_COUNTER = 0x8CB92BA72F3D8DD7
INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finaliser."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@functools.lru_cache(maxsize=256)
def label_hash(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")


def stream_head(seed: int, label: str) -> int:
    """Per-(seed, label) head from which every replica key is derived."""
    return mix64((int(seed) & MASK64) ^ label_hash(label))


def replica_key(head: int, replica: int) -> int:
    return mix64(head ^ mix64((int(replica) + C_INDEX) & MASK64))


def stream_key(seed: int, replica: int, label: str) -> int:
    """64-bit key for the stream ``label`` of replica ``replica``."""
    return replica_key(stream_head(seed, label), replica)


def index_hash(key: int, i: int) -> int:
    """Sub-stream base for index ``i`` (a particle, or a lattice column)."""
    return mix64(key ^ mix64((int(i) * GOLDEN + C_INDEX) & MASK64))


def bits(base: int, k: int) -> int:
    return mix64(base ^ mix64((int(k) + C_COUNTER) & MASK64))


def to_unit(x: int) -> float:
    """Map 64 random bits to the open interval (0, 1)."""
    return ((x >> 11) + 0.5) * INV53


def uniform(key: int, i: int, k: int) -> float:
    return to_unit(bits(index_hash(key, i), k))


def exponential(u: float, rate: float) -> float:
    return -math.log(u) / rate


def geometric(u: float, log_q: float) -> int:
    """Inverse transform for P(G = k) = q^k (1 - q); ``log_q`` may be -inf."""
    if log_q == -math.inf:
        return 0
    return int(math.floor(math.log(u) / log_q))


class Streams:
    """Named keys for one replica, e.g. ``Streams(seed, r).key('coin')``."""

    def __init__(self, seed: int, replica: int = 0, prefix: str = ""):
        self.seed = int(seed)
        self.replica = int(replica)
        self.prefix = prefix

    def key(self, label: str) -> int:
        return stream_key(self.seed, self.replica, self.prefix + label)

    def child(self, prefix: str) -> "Streams":
        return Streams(self.seed, self.replica, self.prefix + prefix + "/")
