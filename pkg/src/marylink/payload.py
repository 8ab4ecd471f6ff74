"""
Audio payloads: 16-bit mono PCM WAV I/O and end-to-end transmission.

Samples are serialised least-significant bit first within each 16-bit
word, words in time order. The source and channel coder stages of the link
are identity pass-throughs; anything with ``encode``/``decode`` methods on
:class:`~marylink.modem.BitStream` can be plugged in instead.
"""

import os
import struct
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .analysis import axis_to_snr
from .channel import awgn, noise_spec_from_snr
from .exceptions import UnsupportedFormatError, WavParseError
from .modem import BitStream, Modem

__all__ = [
    "AudioPayload",
    "TransmissionReport",
    "PassThroughCoder",
    "wav_read",
    "wav_write",
    "payload_to_bits",
    "bits_to_payload",
    "wav_bytes",
    "atomic_write",
    "voice_fixture",
    "transmit_pipeline",
]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# Noise stream key for the pipeline, distinct from Monte Carlo point streams.
_PIPELINE_STREAM = 7
_SCHEME_KEY = {"PSK": 1, "QAM": 2, "FSK": 3}


@dataclass(frozen=True, eq=False)
class AudioPayload:
    """Mono 16-bit PCM samples plus their sample rate."""

    samples: np.ndarray
    sample_rate_hz: int
    channels: int = 1

    def __post_init__(self):
        raw = np.asarray(self.samples)
        if raw.size and (raw.min() < -32768 or raw.max() > 32767):
            raise ValueError("samples exceed the 16-bit signed range")
        samples = raw.astype(np.int16).ravel()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.channels != 1:
            raise UnsupportedFormatError(
                f"only mono payloads are supported, got {self.channels} channels",
                field="channels")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, AudioPayload):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and self.channels == other.channels
                and np.array_equal(self.samples, other.samples))


def _parse_fmt(body, offset):
    if len(body) < 16:
        raise WavParseError("fmt chunk shorter than 16 bytes", offset)
    fmt_code, channels, rate, _byte_rate, block_align, bits = struct.unpack_from(
        "<HHIIHH", body)
    if fmt_code == WAVE_FORMAT_EXTENSIBLE and len(body) >= 26:
        # first two bytes of the sub-format GUID carry the real format code
        fmt_code = struct.unpack_from("<H", body, 24)[0]
    if fmt_code != WAVE_FORMAT_PCM:
        raise UnsupportedFormatError(
            f"format_code {fmt_code:#06x} is not integer PCM (1)", field="format_code")
    if channels != 1:
        raise UnsupportedFormatError(
            f"channels is {channels}; only mono is supported", field="channels")
    if bits != 16:
        raise UnsupportedFormatError(
            f"bits_per_sample is {bits}; only 16 is supported", field="bits_per_sample")
    if block_align != 2:
        raise UnsupportedFormatError(
            f"block_align is {block_align}; expected 2", field="block_align")
    if rate == 0:
        raise UnsupportedFormatError("sample_rate is 0", field="sample_rate")
    return rate


def wav_read(path):
    """Read a 16-bit mono PCM WAV file.

    Raises
    ------
    UnsupportedFormatError
        Non-PCM data, more than one channel or a sample width other than
        16 bits; ``field`` names the header field.
    WavParseError
        Missing RIFF/WAVE signature, truncated chunks or no data chunk;
        ``offset`` is the byte position of the problem.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise WavParseError("file too short for a RIFF header", len(data))
    if data[0:4] != b"RIFF":
        raise WavParseError("missing RIFF signature", 0)
    if data[8:12] != b"WAVE":
        raise WavParseError("RIFF form type is not WAVE", 8)

    rate = None
    samples = None
    offset = 12
    while offset < len(data):
        if offset + 8 > len(data):
            raise WavParseError("truncated chunk header", offset)
        chunk_id, size = struct.unpack_from("<4sI", data, offset)
        body_start = offset + 8
        if body_start + size > len(data):
            raise WavParseError(
                f"chunk {chunk_id!r} declares {size} bytes but only "
                f"{len(data) - body_start} remain", offset)
        body = data[body_start:body_start + size]
        if chunk_id == b"fmt ":
            rate = _parse_fmt(body, offset)
        elif chunk_id == b"data":
            if rate is None:
                raise WavParseError("data chunk before fmt chunk", offset)
            if size % 2:
                raise WavParseError("data chunk holds a partial sample", body_start + size - 1)
            samples = np.frombuffer(body, dtype="<i2").astype(np.int16)
        offset = body_start + size + (size & 1)

    if rate is None:
        raise WavParseError("no fmt chunk", len(data))
    if samples is None:
        raise WavParseError("no data chunk", len(data))
    return AudioPayload(samples, rate, 1)


def atomic_write(path, blob):
    """Write `blob` to a temp file beside `path`, then rename over it."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def wav_bytes(p):
    """Canonical 44-byte-header PCM encoding of `p`."""
    pcm = p.samples.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, 1, p.sample_rate_hz, 2 * p.sample_rate_hz, 2, 16,
        b"data", len(pcm))
    return header + pcm


def wav_write(path, p):
    """Write `p` as a canonical PCM WAV, replacing `path` atomically."""
    atomic_write(path, wav_bytes(p))


def payload_to_bits(p):
    """Flatten samples to bits, LSB first within each 16-bit word."""
    raw = p.samples.astype("<i2").view(np.uint8)
    return BitStream(np.unpackbits(raw, bitorder="little"))


def bits_to_payload(b, template):
    """Rebuild samples from bits; `template` supplies rate and length."""
    n_bits = 16 * len(template)
    bits = np.asarray(b.payload[:n_bits], dtype=np.uint8)
    if bits.size < n_bits:
        raise ValueError(f"need {n_bits} bits, got {bits.size}")
    samples = np.packbits(bits, bitorder="little").view("<i2")
    return AudioPayload(samples, template.sample_rate_hz, template.channels)


def voice_fixture(n_samples=100_000, sample_rate_hz=8000):
    """Deterministic speech stand-in: voiced tone plus a chirp, syllable-gated.

    A 3 Hz raised-cosine envelope gates a 180 Hz fundamental with two
    harmonics and a 300-3000 Hz chirp, scaled to about 80% of full scale.
    """
    t = np.arange(n_samples) / sample_rate_hz
    duration = max(t[-1], 1.0 / sample_rate_hz) if n_samples else 1.0
    voiced = (np.sin(2 * np.pi * 180 * t) + 0.5 * np.sin(2 * np.pi * 360 * t)
              + 0.25 * np.sin(2 * np.pi * 540 * t))
    f0, f1 = 300.0, 3000.0
    chirp = np.sin(2 * np.pi * (f0 * t + (f1 - f0) * t * t / (2 * duration)))
    envelope = 0.5 * (1 - np.cos(2 * np.pi * 3 * t))
    signal = envelope * (voiced / 1.75 * 0.7 + 0.3 * chirp)
    return AudioPayload(np.round(0.8 * 32767 * signal).astype(np.int16), sample_rate_hz)


class PassThroughCoder:
    """Identity coder used for the source and channel coding stages."""

    def encode(self, bits):
        return bits

    def decode(self, bits):
        return bits


@dataclass(frozen=True)
class TransmissionReport:
    scheme: str
    m: int
    eb_n0_db: float
    seed: int
    bit_errors: int
    total_bits: int
    ber: float
    sample_mse: float
    max_abs_sample_error: int

    def to_dict(self):
        return asdict(self)


def _send(modem, bits, noise, chunk_bits):
    """Modulate, add noise and detect `bits` in chunks from one noise stream."""
    rng = noise.rng()
    padded = bits.padded(modem.k)
    step = max(modem.k, chunk_bits // modem.k * modem.k)
    out = []
    for start in range(0, len(padded), step):
        chunk = padded.bits[start:start + step]
        received = awgn(modem.modulate(chunk), noise, rng)
        out.append(modem.demodulate(received).bits)
    detected = np.concatenate(out) if out else np.zeros(0, np.uint8)
    return BitStream(detected[:bits.original_length])


def transmit_pipeline(p, scheme, m, eb_n0_db, seed=0, *, convention="paper",
                      source_coder=None, channel_coder=None, chunk_bits=1 << 18):
    """Send `p` through the simulated link and rebuild it.

    The chain is payload bits -> source coder -> channel coder -> modulator
    -> AWGN -> detector -> channel decoder -> source decoder -> samples.
    ``eb_n0_db = math.inf`` runs the link without noise.

    Returns
    -------
    (AudioPayload, TransmissionReport)
    """
    modem = Modem(scheme, m)
    source_coder = source_coder or PassThroughCoder()
    channel_coder = channel_coder or PassThroughCoder()
    snr = axis_to_snr(eb_n0_db, m, convention)
    noise = noise_spec_from_snr(snr, es=1.0, seed=seed,
                                stream=(_PIPELINE_STREAM, _SCHEME_KEY[modem.scheme], m))

    sent = payload_to_bits(p)
    coded = channel_coder.encode(source_coder.encode(sent))
    detected = _send(modem, coded, noise, chunk_bits)
    decoded = source_coder.decode(channel_coder.decode(detected))
    out = bits_to_payload(decoded, p)

    received = payload_to_bits(out)
    bit_errors = int(np.count_nonzero(received.bits != sent.bits))
    total = len(sent)
    diff = out.samples.astype(np.int64) - p.samples.astype(np.int64)
    report = TransmissionReport(
        scheme=modem.scheme, m=m, eb_n0_db=float(eb_n0_db), seed=seed,
        bit_errors=bit_errors, total_bits=total,
        ber=bit_errors / total if total else 0.0,
        sample_mse=float(np.mean(diff * diff)) if diff.size else 0.0,
        max_abs_sample_error=int(np.max(np.abs(diff))) if diff.size else 0)
    return out, report
