import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from marylink.exceptions import UnsupportedFormatError, WavParseError
from marylink.modem import SUPPORTED_ORDERS, BitStream
from marylink.payload import (
    AudioPayload,
    PassThroughCoder,
    bits_to_payload,
    payload_to_bits,
    transmit_pipeline,
    voice_fixture,
    wav_bytes,
    wav_read,
    wav_write,
)

BPSK_6DB = 0.0023882907809328063

int16_arrays = arrays(np.int16, st.integers(0, 300))


def header(fmt_code=1, channels=1, rate=8000, bits=16, data=b""):
    block = channels * bits // 8
    return struct.pack("<4sI4s4sIHHIIHH4sI", b"RIFF", 36 + len(data), b"WAVE",
                       b"fmt ", 16, fmt_code, channels, rate, rate * block, block, bits,
                       b"data", len(data)) + data


@pytest.fixture
def wav_path(tmp_path):
    return tmp_path / "x.wav"


class TestAudioPayload:
    def test_range_checked(self):
        with pytest.raises(ValueError):
            AudioPayload(np.array([40000]), 8000)

    def test_mono_only(self):
        with pytest.raises(UnsupportedFormatError) as info:
            AudioPayload(np.zeros(4), 8000, channels=2)
        assert info.value.field == "channels"

    def test_rate_positive(self):
        with pytest.raises(ValueError):
            AudioPayload(np.zeros(4), 0)

    def test_samples_read_only(self):
        p = AudioPayload([1, 2, 3], 8000)
        with pytest.raises(ValueError):
            p.samples[0] = 5


class TestWav:
    def test_sine_fixture(self, wav_path):
        t = np.arange(100) / 8000
        p = AudioPayload(np.round(10000 * np.sin(2 * np.pi * 1000 * t)), 8000)
        wav_write(wav_path, p)
        q = wav_read(wav_path)
        assert len(q) == 100 and q.sample_rate_hz == 8000

    @settings(max_examples=50, deadline=None)
    @given(int16_arrays, st.integers(1, 192_000))
    def test_round_trip(self, tmp_path_factory, samples, rate):
        path = tmp_path_factory.mktemp("wav") / "r.wav"
        p = AudioPayload(samples, rate)
        wav_write(path, p)
        assert wav_read(path) == p

    def test_empty_payload(self, wav_path):
        wav_write(wav_path, AudioPayload(np.zeros(0), 8000))
        raw = wav_path.read_bytes()
        assert len(raw) == 44
        assert struct.unpack_from("<I", raw, 40)[0] == 0
        assert len(wav_read(wav_path)) == 0

    def test_header_sizes(self):
        raw = wav_bytes(AudioPayload(np.arange(37), 16000))
        assert struct.unpack_from("<I", raw, 4)[0] == len(raw) - 8
        assert struct.unpack_from("<I", raw, 40)[0] == 74
        assert raw[36:40] == b"data"

    def test_little_endian_samples(self):
        raw = wav_bytes(AudioPayload([0x0102, -2], 8000))
        assert raw[44:] == b"\x02\x01\xfe\xff"

    def test_matches_independent_writer(self, wav_path):
        # stdlib wave module as an independent encoder
        import wave
        samples = np.array([0, 1, -1, 32767, -32768, 1234], np.int16)
        with wave.open(str(wav_path), "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(11025)
            w.writeframes(samples.astype("<i2").tobytes())
        p = wav_read(wav_path)
        np.testing.assert_array_equal(p.samples, samples)
        assert wav_path.read_bytes() == wav_bytes(p)

    def test_extra_chunks_skipped(self, wav_path):
        raw = header(data=b"\x05\x00")
        # odd-sized LIST chunk with its pad byte, inserted before "data"
        extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
        raw = raw[:36] + extra + raw[36:]
        wav_path.write_bytes(raw)
        assert wav_read(wav_path).samples.tolist() == [5]

    @pytest.mark.parametrize("kwargs, field", [
        ({"fmt_code": 3, "bits": 32}, "format_code"),
        ({"channels": 2}, "channels"),
        ({"bits": 8}, "bits_per_sample"),
        ({"bits": 24}, "bits_per_sample"),
    ])
    def test_unsupported_format(self, wav_path, kwargs, field):
        wav_path.write_bytes(header(**kwargs))
        with pytest.raises(UnsupportedFormatError) as info:
            wav_read(wav_path)
        assert info.value.field == field
        assert field in str(info.value)

    def test_truncated_data(self, wav_path):
        raw = header(data=b"\x00" * 20)[:50]
        wav_path.write_bytes(raw)
        with pytest.raises(WavParseError) as info:
            wav_read(wav_path)
        assert info.value.offset == 36

    def test_truncated_chunk_header(self, wav_path):
        wav_path.write_bytes(header()[:40])
        with pytest.raises(WavParseError) as info:
            wav_read(wav_path)
        assert info.value.offset == 36
        assert "byte offset 36" in str(info.value)

    @pytest.mark.parametrize("raw, offset", [
        (b"RIF", 3),
        (b"RIFX" + b"\x00" * 40, 0),
        (b"RIFF\x00\x00\x00\x00AVI " + b"\x00" * 32, 8),
    ])
    def test_bad_signature(self, wav_path, raw, offset):
        wav_path.write_bytes(raw)
        with pytest.raises(WavParseError) as info:
            wav_read(wav_path)
        assert info.value.offset == offset

    def test_missing_data_chunk(self, wav_path):
        wav_path.write_bytes(header()[:36])
        with pytest.raises(WavParseError):
            wav_read(wav_path)

    def test_overwrite_is_clean(self, wav_path):
        wav_write(wav_path, AudioPayload(np.arange(1000), 8000))
        wav_write(wav_path, AudioPayload(np.arange(3), 8000))
        assert len(wav_path.read_bytes()) == 50
        assert [f.name for f in wav_path.parent.iterdir()] == ["x.wav"]


class TestBits:
    def test_zero_samples(self):
        assert len(payload_to_bits(AudioPayload(np.zeros(0), 8000))) == 0

    def test_bit_order(self):
        bits = payload_to_bits(AudioPayload([1, -32768], 8000)).bits
        assert bits[:16].tolist() == [1] + [0] * 15
        assert bits[16:].tolist() == [0] * 15 + [1]

    @given(int16_arrays)
    def test_inverse(self, samples):
        p = AudioPayload(samples, 8000)
        assert bits_to_payload(payload_to_bits(p), p) == p

    @given(arrays(np.int16, st.integers(1, 50)), st.data())
    def test_sign_flip_locality(self, samples, data):
        p = AudioPayload(samples, 8000)
        i = data.draw(st.integers(0, len(samples) - 1))
        bits = payload_to_bits(p).bits.copy()
        bits[16 * i + 15] ^= 1
        q = bits_to_payload(BitStream(bits), p)
        changed = np.flatnonzero(q.samples != p.samples)
        assert changed.tolist() == [i]

    def test_too_few_bits(self):
        with pytest.raises(ValueError):
            bits_to_payload(BitStream(np.zeros(8)), AudioPayload([1], 8000))


def test_fixture_deterministic():
    a, b = voice_fixture(), voice_fixture()
    assert a == b and len(a) == 100_000
    assert a.samples.max() > 20_000 and a.samples.min() < -20_000


SMALL = voice_fixture(4_000)
ALL_ORDERS = [(s, m) for s, ms in SUPPORTED_ORDERS.items() for m in ms]


class TestPipeline:
    @pytest.mark.parametrize("scheme, m", ALL_ORDERS)
    def test_noiseless_identity(self, scheme, m):
        out, report = transmit_pipeline(SMALL, scheme, m, math.inf, seed=1)
        assert out == SMALL
        assert report.ber == 0 and report.sample_mse == 0
        assert report.max_abs_sample_error == 0

    def test_bpsk_6db(self):
        p = voice_fixture()
        _, r = transmit_pipeline(p, "PSK", 2, 6.0, seed=0)
        assert r.total_bits == 1_600_000
        assert abs(r.ber - BPSK_6DB) <= 3 * math.sqrt(BPSK_6DB * (1 - BPSK_6DB) / r.total_bits)

    def test_fsk_worse_than_psk(self):
        p = voice_fixture()
        _, fsk = transmit_pipeline(p, "FSK", 2, 6.0, seed=5)
        _, psk = transmit_pipeline(p, "PSK", 2, 6.0, seed=5)
        assert fsk.bit_errors > psk.bit_errors

    def test_report_invariants(self):
        out, r = transmit_pipeline(SMALL, "QAM", 16, 3.0, seed=2)
        assert r.ber == r.bit_errors / r.total_bits
        assert (r.sample_mse == 0) == (r.bit_errors == 0)
        diff = out.samples.astype(np.int64) - SMALL.samples
        assert r.sample_mse == pytest.approx(np.mean(diff ** 2))
        assert r.max_abs_sample_error == np.max(np.abs(diff))
        assert set(r.to_dict()) == {"scheme", "m", "eb_n0_db", "seed", "bit_errors",
                                    "total_bits", "ber", "sample_mse",
                                    "max_abs_sample_error"}

    def test_reproducible(self):
        a = transmit_pipeline(SMALL, "PSK", 8, 4.0, seed=9)
        b = transmit_pipeline(SMALL, "PSK", 8, 4.0, seed=9)
        assert a[0] == b[0] and a[1] == b[1]

    def test_chunking_does_not_change_result(self):
        a = transmit_pipeline(SMALL, "FSK", 8, 4.0, seed=9)
        b = transmit_pipeline(SMALL, "FSK", 8, 4.0, seed=9, chunk_bits=999)
        assert a[1] == b[1]

    def test_empty_payload(self):
        out, r = transmit_pipeline(AudioPayload(np.zeros(0), 8000), "PSK", 4, 6.0)
        assert len(out) == 0 and r.total_bits == 0 and r.ber == 0.0

    def test_coder_seam(self):
        class Repeat3:
            """Rate-1/3 repetition code with majority vote."""

            def encode(self, b):
                return BitStream(np.repeat(b.payload, 3))

            def decode(self, b):
                votes = b.payload.reshape(-1, 3).sum(axis=1)
                return BitStream((votes >= 2).astype(np.uint8))

        _, plain = transmit_pipeline(SMALL, "PSK", 2, 4.0, seed=3)
        _, coded = transmit_pipeline(SMALL, "PSK", 2, 4.0, seed=3, channel_coder=Repeat3(),
                                     source_coder=PassThroughCoder())
        assert coded.total_bits == plain.total_bits
        assert coded.bit_errors < plain.bit_errors

    def test_unsupported(self):
        from marylink.exceptions import ConfigurationError
        with pytest.raises(ConfigurationError):
            transmit_pipeline(SMALL, "QAM", 8, 6.0)
