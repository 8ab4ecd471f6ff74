"""
Monte Carlo BER/SER estimation and analytic curves on a shared schema.

A point is simulated in batches (random bits -> modulate -> AWGN ->
detect) until enough bit errors are seen or the bit budget runs out.
Each point owns RNG streams keyed by ``(seed, scheme, m, grid index)``, so
results never depend on scheduling and appending grid points leaves the
earlier ones untouched.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .analysis import axis_to_snr, fsk_ber_union, ser_to_ber, symbol_error_probability
from .channel import awgn, make_rng, noise_spec_from_snr
from .exceptions import ConfigurationError, DomainError
from .modem import Modem

__all__ = [
    "DEFAULT_GRID_DB",
    "StopCriteria",
    "BerEstimate",
    "BerCurve",
    "wilson_interval",
    "estimate_ber",
    "sweep",
    "analytic_curve",
]

DEFAULT_GRID_DB = tuple(float(x) for x in range(13))

_SCHEME_KEY = {"PSK": 1, "QAM": 2, "FSK": 3}


@dataclass(frozen=True)
class StopCriteria:
    """Stop after `min_bit_errors` errors or `max_bits` bits, whichever first."""

    min_bit_errors: int = 100
    max_bits: int = 10_000_000
    batch_size: int = 100_000

    def __post_init__(self):
        for name in ("min_bit_errors", "max_bits", "batch_size"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")


def wilson_interval(errors, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion.

    Returns ``(0, 1)`` when there are no trials.
    """
    if trials == 0:
        return 0.0, 1.0
    if not 0 <= errors <= trials:
        raise DomainError(f"need 0 <= errors <= trials, got {errors}/{trials}")
    z = norm.ppf(0.5 + confidence / 2.0)
    p = errors / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / (1.0 + z2n)
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


@dataclass(frozen=True)
class BerEstimate:
    """Simulated error counts for one operating point.

    Bit and symbol counts are both kept; the ``ci_*`` fields are 95% Wilson
    intervals. ``stopped_by`` is ``"min_bit_errors"`` or ``"max_bits"``.
    """

    scheme: str
    m: int
    eb_n0_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    ci_low: float
    ci_high: float
    stopped_by: str
    seed: int
    symbols_sent: int = 0
    symbol_errors: int = 0
    ser: float = 0.0
    ser_ci_low: float = 0.0
    ser_ci_high: float = 1.0
    convention: str = "paper"
    stream_id: int = 0

    def interval(self, confidence=0.95, granularity="bit"):
        """Wilson interval at another confidence level."""
        if granularity == "bit":
            return wilson_interval(self.bit_errors, self.bits_sent, confidence)
        return wilson_interval(self.symbol_errors, self.symbols_sent, confidence)

    def value(self, granularity="bit"):
        return self.ber if granularity == "bit" else self.ser


def estimate_ber(scheme, m, eb_n0_db, stop=StopCriteria(), seed=0, *,
                 convention="paper", stream_id=0):
    """Simulate one ``(scheme, m, SNR)`` point.

    Parameters
    ----------
    scheme : {"PSK", "QAM", "FSK"}
    m : int
        Modulation order; see :data:`marylink.modem.SUPPORTED_ORDERS`.
    eb_n0_db : float
        SNR axis value in dB (``math.inf`` for a noiseless link), read
        according to `convention`.
    stop : StopCriteria
    seed : int
    stream_id : int
        Extra stream key, normally the grid index.

    Raises
    ------
    ConfigurationError
        For unsupported ``(scheme, m)``.
    """
    modem = Modem(scheme, m)
    snr = axis_to_snr(eb_n0_db, m, convention)
    key = (_SCHEME_KEY[modem.scheme], m, stream_id)
    noise = noise_spec_from_snr(snr, es=1.0, seed=seed, stream=key + (1,))
    bit_rng = make_rng(seed, *key, 0)
    noise_rng = noise.rng()

    k = modem.k
    if stop.max_bits < k:
        raise ConfigurationError(f"max_bits must be at least k={k}", field="max_bits")
    per_batch = max(k, stop.batch_size // k * k)
    bits_sent = bit_errors = symbol_errors = 0
    while True:
        n = min(per_batch, (stop.max_bits - bits_sent) // k * k)
        bits = bit_rng.integers(0, 2, size=n, dtype=np.uint8)
        received = awgn(modem.modulate(bits), noise, noise_rng)
        wrong = modem.demodulate(received).bits != bits
        bits_sent += n
        bit_errors += int(np.count_nonzero(wrong))
        symbol_errors += int(np.count_nonzero(wrong.reshape(-1, k).any(axis=1)))
        if bit_errors >= stop.min_bit_errors:
            stopped_by = "min_bit_errors"
            break
        if bits_sent + k > stop.max_bits:
            stopped_by = "max_bits"
            break

    symbols_sent = bits_sent // k
    ci_low, ci_high = wilson_interval(bit_errors, bits_sent)
    ser_low, ser_high = wilson_interval(symbol_errors, symbols_sent)
    return BerEstimate(
        scheme=modem.scheme, m=m, eb_n0_db=float(eb_n0_db),
        bits_sent=bits_sent, bit_errors=bit_errors, ber=bit_errors / bits_sent,
        ci_low=ci_low, ci_high=ci_high, stopped_by=stopped_by, seed=seed,
        symbols_sent=symbols_sent, symbol_errors=symbol_errors,
        ser=symbol_errors / symbols_sent, ser_ci_low=ser_low, ser_ci_high=ser_high,
        convention=convention, stream_id=stream_id)


@dataclass(frozen=True)
class BerCurve:
    """Error rate versus SNR, analytic or simulated.

    ``ci_low``/``ci_high`` are NaN and ``seed`` is None for analytic modes.
    """

    scheme: str
    m: int
    mode: str
    granularity: str
    snr_db: tuple
    values: tuple
    ci_low: tuple = None
    ci_high: tuple = None
    seed: int = None
    convention: str = "paper"
    estimates: tuple = field(default=None, repr=False)

    def __post_init__(self):
        snr = tuple(float(x) for x in self.snr_db)
        values = tuple(float(v) for v in self.values)
        if len(snr) != len(values):
            raise DomainError("snr_db and values differ in length")
        if any(b <= a for a, b in zip(snr, snr[1:])):
            raise DomainError("SNR points must be strictly increasing")
        if not all(0.0 <= v <= 1.0 for v in values):
            raise DomainError("curve values must lie in [0, 1]")
        nan = (math.nan,) * len(snr)
        object.__setattr__(self, "snr_db", snr)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ci_low", tuple(self.ci_low) if self.ci_low else nan)
        object.__setattr__(self, "ci_high", tuple(self.ci_high) if self.ci_high else nan)

    @property
    def points(self):
        """``(snr_db, value, mode)`` triples."""
        return [(x, v, self.mode) for x, v in zip(self.snr_db, self.values)]

    def value_at(self, snr_db):
        return self.values[self.snr_db.index(float(snr_db))]

    def rows(self):
        """One dict per point, in the column order used by the CSV writer."""
        for x, v, lo, hi in zip(self.snr_db, self.values, self.ci_low, self.ci_high):
            yield {
                "scheme": self.scheme, "m": self.m, "mode": self.mode,
                "granularity": self.granularity, "ebn0_db": x, "value": v,
                "ci_low": lo, "ci_high": hi, "seed": self.seed,
            }


def _check_granularity(granularity):
    if granularity not in ("bit", "symbol"):
        raise ConfigurationError(
            f"granularity must be 'bit' or 'symbol', got {granularity!r}",
            field="granularity")


def sweep(scheme, m, grid=DEFAULT_GRID_DB, stop=StopCriteria(), seed=0, *,
          granularity="bit", convention="paper", workers=None):
    """Simulate every grid point; point ``i`` uses stream id ``i``.

    `workers` > 1 runs points on a thread pool; output is identical to the
    sequential run.
    """
    _check_granularity(granularity)
    grid = [float(x) for x in grid]

    def run(item):
        index, snr_db = item
        return estimate_ber(scheme, m, snr_db, stop, seed,
                            convention=convention, stream_id=index)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            estimates = list(pool.map(run, enumerate(grid)))
    else:
        estimates = [run(item) for item in enumerate(grid)]

    intervals = [e.interval(0.95, granularity) for e in estimates]
    return BerCurve(
        scheme=estimates[0].scheme if estimates else str(scheme).upper(), m=m,
        mode="montecarlo", granularity=granularity, snr_db=grid,
        values=[e.value(granularity) for e in estimates],
        ci_low=[lo for lo, _ in intervals], ci_high=[hi for _, hi in intervals],
        seed=seed, convention=convention, estimates=tuple(estimates))


def analytic_curve(scheme, m, grid=DEFAULT_GRID_DB, mode="exact", *,
                   granularity="bit", convention="paper"):
    """Evaluate an analytic formula over `grid`.

    Bit granularity applies :func:`~marylink.analysis.ser_to_ber` with its
    per-scheme default mapping. Mode ``"union_per_bit"`` (FSK) reads each
    axis value as the per-bit SNR whatever the convention.
    """
    _check_granularity(granularity)
    scheme = str(scheme).upper()
    values = []
    for snr_db in grid:
        if mode == "union_per_bit" and scheme == "FSK":
            per_bit = math.inf if snr_db == math.inf else 10.0 ** (snr_db / 10.0)
            value = fsk_ber_union(m, per_bit, per_bit_energy=True)
        else:
            es_n0 = axis_to_snr(snr_db, m, convention).es_n0_linear
            value = symbol_error_probability(scheme, m, es_n0, mode)
        if granularity == "bit":
            value = ser_to_ber(value)
        values.append(value.value)
    return BerCurve(scheme=scheme, m=m, mode=mode, granularity=granularity,
                    snr_db=grid, values=values, convention=convention)
