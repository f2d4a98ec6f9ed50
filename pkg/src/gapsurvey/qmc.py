"""Embedded base-2 rank-1 lattice points on [-1/2, 1/2]^s.

Points are enumerated in van der Corput (bit-reversed) order: index i maps
to the dyadic fraction phi(i) = bitreverse(i) / 2^m_max, and point i is

    y_j = frac(phi(i) * z_j + shift_j) - 1/2 .

With every z_j odd, the first 2^m indices enumerate exactly the rank-1
lattice {frac(k z / 2^m)} for each m <= m_max, so each dyadic prefix of the
stream is itself a (shifted) lattice rule. The single random shift comes
from the splitmix64 generator, fixed here by specification so that a seed
reproduces the identical point set on any platform:

    state += 0x9E3779B97F4A7C15            (golden-ratio increment, mod 2^64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output = z ^ (z >> 31)

and each output is mapped to [0, 1) through its top 53 bits.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coefficient import ParameterPoint

__all__ = [
    "LatticeSequence",
    "radical_inverse_base2",
    "splitmix64_stream",
    "random_shift",
    "lattice_point",
    "lattice_points_block",
    "parse_generating_vector",
    "korobov_vector",
    "genvec_checksum",
    "DEFAULT_KOROBOV_MULTIPLIER",
]

_MASK64 = (1 << 64) - 1

# Odd multiplier for the built-in Korobov-form vector z_j = a^(j-1) mod 2^m.
# This is a generic fallback chosen for this artifact, NOT a published
# lattice generating vector; pass --genvec to use one from the literature.
DEFAULT_KOROBOV_MULTIPLIER = 334293


def radical_inverse_base2(i: int, m_max: int) -> float:
    """Van der Corput point: bit-reversal of i in m_max bits over 2^m_max."""
    if not 0 <= m_max <= 32:
        raise ValueError(f"m_max must be in 0..32, got {m_max}")
    i = int(i)
    if not 0 <= i < (1 << m_max) and not (m_max == 0 and i == 0):
        raise ValueError(f"index {i} out of range for m_max={m_max}")
    rev = 0
    for _ in range(m_max):
        rev = (rev << 1) | (i & 1)
        i >>= 1
    return rev * 2.0 ** -m_max if m_max else 0.0


def splitmix64_stream(seed: int, count: int) -> list:
    """First ``count`` raw 64-bit outputs of splitmix64 for ``seed``."""
    state = int(seed) & _MASK64
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out

def random_shift(seed: int, s: int) -> np.ndarray:
    """Deterministic random shift in [0, 1)^s from the documented splitmix64
    recurrence; identical for a given seed on every platform."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    raw = splitmix64_stream(seed, s)
    return np.array([(z >> 11) * 2.0 ** -53 for z in raw])


@dataclass(frozen=True)
class LatticeSequence:
    """Immutable description of one shifted embedded lattice stream.

    ``z`` are the generating-vector components (odd for base-2
    extensibility), ``m_max`` caps the stream at 2^m_max points, and
    ``shift`` is the per-coordinate translation mod 1. ``m_max = 0`` is the
    degenerate single-point stream used by smoke configurations.
    """

    z: np.ndarray
    m_max: int
    shift: np.ndarray
    seed: int = 0
    source: str = "explicit"

    def __post_init__(self):
        z = np.ascontiguousarray(self.z, dtype=np.int64)
        shift = np.ascontiguousarray(self.shift, dtype=np.float64)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "shift", shift)
        if z.ndim != 1 or z.size < 1:
            raise ValueError("generating vector must be a nonempty 1-d array")
        if shift.shape != z.shape:
            raise ValueError("shift must have one entry per vector component")
        if not 0 <= self.m_max <= 32:
            raise ValueError(f"m_max must be in 0..32, got {self.m_max}")
        if np.any(z <= 0):
            raise ValueError("generating vector entries must be positive")
        if np.any((shift < 0.0) | (shift >= 1.0)):
            raise ValueError("shift components must lie in [0, 1)")
        even = np.nonzero(z % 2 == 0)[0]
        if even.size:
            warnings.warn(
                f"generating vector has even component(s) at {even.tolist()[:5]}; "
                "dyadic prefixes of the stream lose the lattice property",
                UserWarning, stacklevel=2)
        z.setflags(write=False)
        shift.setflags(write=False)

    @property
    def s(self) -> int:
        return int(self.z.size)

    @property
    def n_max(self) -> int:
        return 1 << self.m_max

    @classmethod
    def create(cls, z, m_max: int, s: int, seed: int = 0, no_shift: bool = False,
               source: str = "explicit") -> "LatticeSequence":
        z = np.ascontiguousarray(z, dtype=np.int64)
        if z.size < s:
            raise ValueError(f"generating vector has {z.size} entries, need {s}")
        shift = np.zeros(s) if no_shift else random_shift(seed, s)
        return cls(z=z[:s], m_max=m_max, shift=shift, seed=seed, source=source)


def _bitrev_block(indices: np.ndarray, m_max: int) -> np.ndarray:
    """Bit-reversal of each index in m_max bits (vectorized, 32-bit wide)."""
    v = indices.astype(np.uint64)
    v = ((v & 0x55555555) << np.uint64(1)) | ((v & 0xAAAAAAAA) >> np.uint64(1))
    v = ((v & 0x33333333) << np.uint64(2)) | ((v & 0xCCCCCCCC) >> np.uint64(2))
    v = ((v & 0x0F0F0F0F) << np.uint64(4)) | ((v & 0xF0F0F0F0) >> np.uint64(4))
    v = ((v & 0x00FF00FF) << np.uint64(8)) | ((v & 0xFF00FF00) >> np.uint64(8))
    v = ((v & 0x0000FFFF) << np.uint64(16)) | ((v & 0xFFFF0000) >> np.uint64(16))
    return v >> np.uint64(32 - m_max)


def lattice_points_block(seq: LatticeSequence, indices) -> np.ndarray:
    """Rows of points for the given indices, shape (len(indices), s).

    All components lie in [-1/2, 1/2). Pure elementwise float arithmetic, so
    results are identical however the index range is split into blocks.
    """
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= seq.n_max):
        raise ValueError(f"indices must lie in [0, 2^{seq.m_max})")
    if seq.m_max == 0:
        phi = np.zeros(idx.size)
    else:
        phi = _bitrev_block(idx, seq.m_max).astype(np.float64) * 2.0 ** -seq.m_max
    t = phi[:, None] * seq.z.astype(np.float64)[None, :] + seq.shift[None, :]
    return t - np.floor(t) - 0.5


def lattice_point(seq: LatticeSequence, i: int) -> ParameterPoint:
    """Point number ``i`` of the stream (bit-for-bit equal to the block path)."""
    row = lattice_points_block(seq, np.array([int(i)]))[0]
    return ParameterPoint(row)


def parse_generating_vector(text: str, s: int | None = None) -> np.ndarray:
    """Parse a generating-vector file.

    Accepted lines: one integer, or two whitespace-separated columns
    (index, value; the value column is taken). ``#`` starts a comment. Even
    entries are kept but flagged with a UserWarning since they break the
    base-2 embedding. With ``s`` given, the first s entries are returned and
    a shorter file is a dimension error.
    """
    entries = []
    for lineno, raw in enumerate(str(text).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cols = line.split()
        if len(cols) not in (1, 2):
            raise ValueError(f"line {lineno}: expected 1 or 2 columns, got {len(cols)}")
        try:
            value = int(cols[-1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer token {cols[-1]!r}") from None
        entries.append(value)
    if not entries:
        raise ValueError("generating vector file holds no entries")
    z = np.array(entries, dtype=np.int64)
    if s is not None:
        if z.size < s:
            raise ValueError(f"generating vector has {z.size} entries, need {s}")
        z = z[:s]
    even = np.nonzero(z % 2 == 0)[0]
    if even.size:
        warnings.warn(
            f"generating vector has even component(s) at {even.tolist()[:5]}; "
            "dyadic prefixes of the stream lose the lattice property",
            UserWarning, stacklevel=2)
    return z


def korobov_vector(s: int, m_max: int, a: int = DEFAULT_KOROBOV_MULTIPLIER) -> np.ndarray:
    """Korobov-form vector z_j = a^(j-1) mod 2^max(m_max, 20), first component 1.

    A generic fallback so the survey runs out of the box; it is NOT a
    published generating vector and no quality claims attach to it beyond
    the structural lattice properties checked by the tests. The modulus is
    held at 2^20 for all m_max <= 20 so that desk-scale and full-scale runs
    of one experiment share the same point stream prefix.
    """
    if a % 2 == 0:
        raise ValueError("Korobov multiplier must be odd for base-2 lattices")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    modulus = 1 << max(m_max, 20)
    z = np.empty(s, dtype=np.int64)
    acc = 1
    for j in range(s):
        z[j] = acc
        acc = (acc * a) % modulus
    return z


def genvec_checksum(z) -> str:
    """sha256 over the decimal components; stable provenance fingerprint."""
    payload = ",".join(str(int(v)) for v in np.asarray(z).ravel())
    return hashlib.sha256(payload.encode()).hexdigest()
