"""
Additive white Gaussian noise with reproducible, splittable streams.

Noise is drawn from numpy's PCG64 bit generator seeded through a
``SeedSequence(seed, spawn_key=stream)``; Gaussian variates use numpy's
ziggurat ``standard_normal``. A ``(seed, stream)`` pair therefore names an
independent stream, and concurrent tasks only need distinct stream keys.

Calibration: each real dimension gets variance ``N0 / 2``, so a unit-energy
symbol sees ``Es/N0 = 1 / N0``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = ["NoiseSpec", "make_rng", "noise_spec_from_snr", "awgn_complex",
           "awgn_vector", "awgn"]


def make_rng(seed, *stream):
    """Generator for the independent stream ``stream`` under `seed`."""
    if seed < 0 or any(key < 0 for key in stream):
        raise DomainError("seed and stream keys must be non-negative integers")
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in stream))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level ``n0`` (linear) plus the stream it is drawn from.

    ``n0 = 0`` means a noiseless pass-through.
    """

    n0: float
    seed: int = 0
    stream: tuple = ()

    def __post_init__(self):
        if not (self.n0 >= 0 and math.isfinite(self.n0)):
            raise DomainError(f"n0 must be finite and >= 0, got {self.n0}")

    @property
    def sigma_per_dim(self):
        return math.sqrt(self.n0 / 2.0)

    def rng(self):
        return make_rng(self.seed, *self.stream)


def noise_spec_from_snr(s, es=1.0, seed=0, stream=()):
    """Noise spec giving the Es/N0 of `s` for symbols of energy `es`."""
    if s.es_n0_linear == math.inf:
        return NoiseSpec(0.0, seed, tuple(stream))
    return NoiseSpec(es / s.es_n0_linear, seed, tuple(stream))


def awgn_complex(symbols, spec, rng=None):
    """Add complex noise with variance ``n0/2`` on each of I and Q.

    Pass `rng` to continue an existing stream (e.g. across batches);
    otherwise a fresh generator is built from ``spec``.
    """
    symbols = np.asarray(symbols, dtype=complex)
    if spec.n0 == 0:
        return symbols.copy()
    rng = spec.rng() if rng is None else rng
    noise = rng.standard_normal((symbols.size, 2)) * spec.sigma_per_dim
    return symbols + (noise[:, 0] + 1j * noise[:, 1]).reshape(symbols.shape)


def awgn_vector(vectors, spec, rng=None):
    """Add real noise with variance ``n0/2`` on every coordinate."""
    vectors = np.asarray(vectors, dtype=float)
    if spec.n0 == 0:
        return vectors.copy()
    rng = spec.rng() if rng is None else rng
    return vectors + spec.sigma_per_dim * rng.standard_normal(vectors.shape)


def awgn(signal, spec, rng=None):
    """Dispatch on dtype: complex baseband or real signal-space vectors."""
    if np.iscomplexobj(signal):
        return awgn_complex(signal, spec, rng)
    return awgn_vector(signal, spec, rng)
