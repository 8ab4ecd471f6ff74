"""
Constellations, bit/symbol mapping and maximum-likelihood detection.

PSK and QAM live in the complex plane with Gray labels and unit average
symbol energy. FSK is modelled as M orthogonal signals, symbol ``i`` being
``sqrt(Es) * e_i`` in an M-dimensional real space; a coherent correlator
bank then reduces to picking the largest coordinate.

Ties in detection always resolve to the lowest point index, so simulations
are reproducible bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

from .analysis import bits_per_symbol
from .exceptions import ConfigurationError, DomainError

__all__ = [
    "SUPPORTED_ORDERS",
    "BitStream",
    "Constellation",
    "FskSignalSet",
    "Modem",
    "gray_code",
    "build_psk",
    "build_qam",
    "modulate",
    "demodulate_ml",
    "fsk_modulate",
    "fsk_demodulate",
    "check_supported",
]

SUPPORTED_ORDERS = {
    "PSK": (2, 4, 8, 16, 32),
    "QAM": (2, 4, 16, 64),
    "FSK": (2, 4, 8, 16, 32),
}

# Rows per detection chunk; bounds the (rows x M) distance matrix.
_CHUNK = 1 << 16


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def gray_code(n):
    """Binary-reflected Gray code of the integers ``0 .. n-1``."""
    i = np.arange(n)
    return i ^ (i >> 1)


def _ints_to_bits(ints, k):
    shifts = np.arange(k - 1, -1, -1)
    return ((np.asarray(ints)[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def _bits_to_ints(bits, k):
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % k:
        raise DomainError(
            f"{bits.size} bits is not a multiple of k={k}; pad the stream first")
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.reshape(-1, k) @ weights


@dataclass(frozen=True, eq=False)
class BitStream:
    """Bits plus the length of the payload before zero padding."""

    bits: np.ndarray
    original_length: int = None

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8).ravel()
        if bits.size and bits.max() > 1:
            raise DomainError("bits must be 0 or 1")
        object.__setattr__(self, "bits", _readonly(bits))
        if self.original_length is None:
            object.__setattr__(self, "original_length", bits.size)
        if not 0 <= self.original_length <= bits.size:
            raise DomainError(
                f"original_length {self.original_length} exceeds {bits.size} bits")

    def __len__(self):
        return self.bits.size

    @property
    def payload(self):
        """The bits without padding."""
        return self.bits[:self.original_length]

    def padded(self, k):
        """Zero-pad to a multiple of `k`, keeping `original_length`."""
        extra = -self.bits.size % k
        if not extra:
            return self
        return BitStream(np.concatenate([self.bits, np.zeros(extra, np.uint8)]),
                         self.original_length)

    @classmethod
    def random(cls, n, rng):
        return cls(rng.integers(0, 2, size=n, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-energy signal points with index-aligned integer bit labels.

    ``labels[i]`` is the k-bit word (MSB first) carried by ``points[i]``.
    """

    scheme: str
    m: int
    points: np.ndarray
    labels: np.ndarray
    index_of_label: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=complex)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.shape != (self.m,) or labels.shape != (self.m,):
            raise DomainError(f"need {self.m} points and labels")
        if not np.array_equal(np.sort(labels), np.arange(self.m)):
            raise DomainError("labels must be a permutation of all k-bit words")
        energy = np.mean(np.abs(points) ** 2)
        if abs(energy - 1.0) > 1e-12:
            raise DomainError(f"average energy {energy!r} is not 1")
        inverse = np.empty(self.m, dtype=np.int64)
        inverse[labels] = np.arange(self.m)
        object.__setattr__(self, "points", _readonly(points))
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "index_of_label", _readonly(inverse))

    @property
    def k(self):
        return bits_per_symbol(self.m)

    @property
    def label_bits(self):
        """``(m, k)`` array of label bits, MSB first."""
        return _ints_to_bits(self.labels, self.k).reshape(self.m, self.k)


def build_psk(m):
    """M-PSK on the unit circle with Gray labels around the ring.

    Point ``i`` sits at angle ``2 pi i / m``, rotated by ``pi/4`` for
    ``m = 4`` so QPSK coincides with 4-QAM.
    """
    bits_per_symbol(m)
    offset = np.pi / 4 if m == 4 else 0.0
    points = np.exp(1j * (2 * np.pi * np.arange(m) / m + offset))
    if m == 2:
        points = np.array([1.0 + 0j, -1.0 + 0j])
    return Constellation("PSK", m, points, gray_code(m))


def build_qam(m):
    """Square M-QAM with independent Gray labels on each rail.

    The label is ``(gray(i_I) << k/2) | gray(i_Q)``. ``m = 2`` gives the
    antipodal (BPSK) pair.
    """
    k = bits_per_symbol(m)
    if m == 2:
        bpsk = build_psk(2)
        return Constellation("QAM", 2, bpsk.points, bpsk.labels)
    if k % 2:
        raise ConfigurationError(
            f"square QAM needs an even number of bits per symbol, got M={m}",
            field="m")
    side = 1 << (k // 2)
    levels = 2 * np.arange(side) - (side - 1)
    gray = gray_code(side)
    i_idx, q_idx = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    i_idx = i_idx.ravel()
    q_idx = q_idx.ravel()
    scale = np.sqrt(2.0 * (m - 1) / 3.0)
    points = (levels[i_idx] + 1j * levels[q_idx]) / scale
    labels = (gray[i_idx] << (k // 2)) | gray[q_idx]
    return Constellation("QAM", m, points, labels)


def _as_bits(bits):
    return bits.bits if isinstance(bits, BitStream) else np.asarray(bits, np.uint8)


def modulate(bits, c):
    """Map k-bit groups to constellation points.

    `bits` must already be padded to a multiple of ``c.k``.
    """
    words = _bits_to_ints(_as_bits(bits), c.k)
    return c.points[c.index_of_label[words]]


def _nearest(received, points):
    received = np.asarray(received, dtype=complex).ravel()
    out = np.empty(received.size, dtype=np.int64)
    for start in range(0, received.size, _CHUNK):
        chunk = received[start:start + _CHUNK]
        dist = np.abs(chunk[:, None] - points[None, :]) ** 2
        out[start:start + _CHUNK] = np.argmin(dist, axis=1)
    return out


def demodulate_ml(received, c, original_length=None):
    """Minimum-distance detection back to bits.

    Each sample is decided to the nearest point (first index on ties) and
    replaced by that point's label.
    """
    idx = _nearest(received, c.points)
    bits = _ints_to_bits(c.labels[idx], c.k)
    return BitStream(bits, original_length)


@dataclass(frozen=True)
class FskSignalSet:
    """M orthogonal signals of energy `es`; symbol i is ``sqrt(es) * e_i``."""

    m: int
    es: float = 1.0

    def __post_init__(self):
        bits_per_symbol(self.m)
        if not self.es > 0:
            raise DomainError(f"symbol energy must be positive, got {self.es}")

    @property
    def dimension(self):
        return self.m

    @property
    def k(self):
        return bits_per_symbol(self.m)

    def vectors(self):
        return np.sqrt(self.es) * np.eye(self.m)


def fsk_modulate(bits, s):
    """Natural-binary k-bit groups to rows of ``sqrt(Es) * I``."""
    idx = _bits_to_ints(_as_bits(bits), s.k)
    out = np.zeros((idx.size, s.m))
    out[np.arange(idx.size), idx] = np.sqrt(s.es)
    return out


def fsk_demodulate(received, s, original_length=None):
    """Largest-correlator decision, ties to the lowest index."""
    received = np.asarray(received, dtype=float).reshape(-1, s.m)
    idx = np.argmax(received, axis=1)
    return BitStream(_ints_to_bits(idx, s.k), original_length)


def check_supported(scheme, m):
    """Normalise `scheme` and validate ``(scheme, m)`` for simulation."""
    name = str(scheme).upper()
    if name not in SUPPORTED_ORDERS:
        raise ConfigurationError(
            f"unknown scheme {scheme!r}; expected one of {tuple(SUPPORTED_ORDERS)}",
            field="scheme")
    if m not in SUPPORTED_ORDERS[name]:
        raise ConfigurationError(
            f"{name} does not support M={m}; supported: {SUPPORTED_ORDERS[name]}",
            field="m")
    return name


class Modem:
    """Bits-in, bits-out front end for one ``(scheme, m)`` pair.

    ``signal_kind`` is ``"complex"`` for PSK/QAM and ``"vector"`` for FSK,
    which tells the channel which noise model applies.
    """

    def __init__(self, scheme, m):
        self.scheme = check_supported(scheme, m)
        self.m = m
        self.k = bits_per_symbol(m)
        if self.scheme == "FSK":
            self.signal_set = FskSignalSet(m)
            self.signal_kind = "vector"
        else:
            build = build_psk if self.scheme == "PSK" else build_qam
            self.signal_set = build(m)
            self.signal_kind = "complex"

    def __repr__(self):
        return f"Modem({self.scheme!r}, {self.m})"

    def modulate(self, bits):
        if self.signal_kind == "vector":
            return fsk_modulate(bits, self.signal_set)
        return modulate(bits, self.signal_set)

    def demodulate(self, received, original_length=None):
        if self.signal_kind == "vector":
            return fsk_demodulate(received, self.signal_set, original_length)
        return demodulate_ml(received, self.signal_set, original_length)
