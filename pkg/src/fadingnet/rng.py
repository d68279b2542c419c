"""Counter-based random numbers keyed by (master seed, stream, index).

Every draw is a pure function of its key, so any single entry of a channel
matrix can be regenerated without touching the rest.  The generator is
SplitMix64 evaluated at an arbitrary counter position:

    state(index) = lane_key + GAMMA * (index + 1)   (mod 2**64)
    output       = mix64(state)

with ``mix64`` the Stafford "variant 13" finalizer used by SplitMix64.
Keys are derived the same way, so the whole scheme is integer arithmetic
modulo 2**64 and bit-identical on every platform.
"""

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# Independent lanes for the different uses of one stream.
LANE_GAIN = 1
LANE_GREEDY = 2

_TWO_M53 = 2.0 ** -53
_TWO_M52 = 2.0 ** -52


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a Python int (reference scalar path)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    # uint64 multiplication wraps modulo 2**64, which is what we want
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_M1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class Seed:
    """A (master, stream) pair; ``stream`` is normally the trial index."""

    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            value = getattr(self, name)
            if not 0 <= int(value) <= MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")

    def lane_key(self, lane: int) -> int:
        k = mix64(self.master + GAMMA)
        k = mix64(k + GAMMA * (self.stream + 1))
        return mix64(k ^ (GAMMA * (lane + 1)))

    def child(self, stream: int) -> "Seed":
        return Seed(self.master, stream)


def random_bits(seed: Seed, index, lane: int = LANE_GAIN) -> np.ndarray:
    """64 random bits for each counter position in ``index`` (vectorized)."""
    key = np.uint64(seed.lane_key(lane))
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = key + np.uint64(GAMMA) * (idx + np.uint64(1))
        return _mix64_array(state)


def uniform_open_closed(bits: np.ndarray) -> np.ndarray:
    """Map 64 random bits to a double on (0, 1]; zero is never produced."""
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53


def uniform_open(bits: np.ndarray) -> np.ndarray:
    """Map 64 random bits to a double on the open interval (0, 1).

    Uses 52 bits so that ``k + 0.5`` stays exactly representable.
    """
    return ((bits >> np.uint64(12)).astype(np.float64) + 0.5) * _TWO_M52


def random_bits_scalar(seed: Seed, index: int, lane: int = LANE_GAIN) -> int:
    """Pure-Python twin of :func:`random_bits` for spot checks."""
    return mix64(seed.lane_key(lane) + GAMMA * (index + 1))
