"""
Analytic symbol/bit error probabilities of M-PSK, M-QAM and M-FSK on AWGN.

Every formula takes the per-symbol SNR ``es_n0`` (linear Es/N0) so that a
single conversion from the plotted SNR axis happens in :class:`SnrSpec`.
Exact forms are evaluated by quadrature; bounds and approximations are
closed forms clamped to ``[0, 1]`` with the unclamped value kept on the
returned :class:`ErrorRateValue`.

Two SNR-axis conventions are supported (see :func:`axis_to_snr`):

``"paper"`` (default)
    The axis value, in dB, is used directly as the per-symbol SNR every
    formula consumes. This is the convention in which M = 4 costs roughly
    an order of magnitude in BER relative to M = 2 at 6 dB.
``"physical"``
    The axis is Eb/N0 and ``Es/N0 = log2(M) * Eb/N0``.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .numerics import (
    DEFAULT_QUADRATURE,
    integrate_finite,
    integrate_gaussian_weighted,
    q_function,
)

__all__ = [
    "CONVENTIONS",
    "SnrSpec",
    "axis_to_snr",
    "ErrorRateValue",
    "Tradeoff",
    "bits_per_symbol",
    "psk_ser_exact",
    "psk_ser_craig",
    "psk_ber_union",
    "psk_ber_large_m",
    "qam_ser_exact",
    "qam_ber_approx1",
    "qam_ber_approx2",
    "qam_ber_large_m",
    "fsk_ser_exact",
    "fsk_ber_union",
    "ser_to_ber",
    "symbol_error_probability",
    "valid_modes",
    "tradeoff_table",
]

CONVENTIONS = ("paper", "physical")
SCHEMES = ("PSK", "QAM", "FSK")


def bits_per_symbol(m):
    """Return ``k = log2(m)``, rejecting anything that is not ``2**k, k >= 1``."""
    m_int = int(m)
    if m_int != m or m_int < 2 or m_int & (m_int - 1):
        raise DomainError(f"modulation order must be a power of two >= 2, got {m}")
    return m_int.bit_length() - 1


def _db_to_linear(db):
    if db == math.inf:
        return math.inf
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SnrSpec:
    """An operating point: Eb/N0 in dB plus the bits per symbol ``k``."""

    eb_n0_db: float
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if math.isnan(self.eb_n0_db) or self.eb_n0_db == -math.inf:
            raise DomainError(f"eb_n0_db must be > -inf, got {self.eb_n0_db}")

    @property
    def m(self):
        return 2**self.k

    @property
    def eb_n0_linear(self):
        return _db_to_linear(self.eb_n0_db)

    @property
    def es_n0_linear(self):
        return self.k * self.eb_n0_linear

    @property
    def es_n0_db(self):
        return 10.0 * math.log10(self.es_n0_linear)

    @classmethod
    def from_es_n0_db(cls, es_n0_db, k):
        if es_n0_db == math.inf:
            return cls(math.inf, k)
        return cls(es_n0_db - 10.0 * math.log10(k), k)


def axis_to_snr(snr_db, m, convention="paper"):
    """Convert a point on the plotted SNR axis to an :class:`SnrSpec`.

    Parameters
    ----------
    snr_db : float
        Axis value in dB; ``math.inf`` selects the noiseless limit.
    m : int
        Modulation order.
    convention : {"paper", "physical"}
        ``"paper"`` reads the axis value as Es/N0; ``"physical"`` reads it
        as Eb/N0.
    """
    k = bits_per_symbol(m)
    if convention == "paper":
        return SnrSpec.from_es_n0_db(snr_db, k)
    if convention == "physical":
        return SnrSpec(snr_db, k)
    raise ConfigurationError(
        f"unknown SNR convention {convention!r}; expected one of {CONVENTIONS}",
        field="convention")


@dataclass(frozen=True)
class ErrorRateValue:
    """An error probability with the bookkeeping needed to plot it honestly.

    ``literal`` marks QAM formulas evaluated outside square-grid validity
    (odd ``k``); ``unclamped`` holds the value before clamping to [0, 1].
    """

    value: float
    granularity: str
    mode: str
    scheme: str
    m: int
    unclamped: float = None
    literal: bool = False

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"error probability {self.value} outside [0, 1]")
        if self.unclamped is None:
            object.__setattr__(self, "unclamped", self.value)

    def __float__(self):
        return float(self.value)


def _sin2_pi_over(m):
    """``sin^2(pi/m)``, exact for m = 2 and 4 so QPSK reduces to 4-QAM bit-for-bit."""
    return {2: 1.0, 4: 0.5}.get(m, math.sin(math.pi / m) ** 2)


def _check_snr(es_n0):
    es_n0 = float(es_n0)
    if math.isnan(es_n0) or es_n0 < 0:
        raise DomainError(f"es_n0 must be >= 0, got {es_n0}")
    return es_n0


def _closed(value, granularity, mode, scheme, m, literal=False):
    value = float(value)
    return ErrorRateValue(min(max(value, 0.0), 1.0), granularity, mode,
                          scheme, int(m), unclamped=value, literal=literal)


def _exact(value, scheme, m):
    # Quadrature noise may push the value a hair outside its true range.
    value = min(max(float(value), 0.0), 1.0 - 1.0 / m)
    return ErrorRateValue(value, "symbol", "exact", scheme, int(m))


# -- PSK ---------------------------------------------------------------------

def psk_ser_exact(m, es_n0, spec=DEFAULT_QUADRATURE):
    """Exact M-PSK symbol error probability from the phase density.

    Integrates the density of the received phase over the error region
    ``pi/M <= |theta| <= pi``. Integrating the error region directly, rather
    than taking one minus the correct-sector mass, keeps full relative
    precision at high SNR.
    """
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    if lam == math.inf:
        return _exact(0.0, "PSK", m)
    root = math.sqrt(lam)

    def phase_density(theta):
        c = np.cos(theta)
        # exp(-lam) * exp(lam cos^2) folded into exp(-lam sin^2) to avoid overflow
        tail = q_function(-math.sqrt(2.0) * root * c)
        return math.exp(-lam) + math.sqrt(4.0 * math.pi) * root * c * np.exp(
            -lam * np.sin(theta) ** 2) * tail

    # Scale the absolute tolerance to the expected size of the answer so
    # tiny error rates keep their relative accuracy.
    bound = psk_ber_union(m, lam).unclamped
    scaled = replace(spec, abs_tol=max(min(spec.abs_tol, 1e-3 * spec.rel_tol * bound),
                                       1e-300))
    # the density is even in theta, so integrate one side and double
    wrong = integrate_finite(phase_density, math.pi / m, math.pi, scaled,
                             points=[math.pi / 2] if m > 2 else None)
    # Never report more than the union bound: at high SNR the true gap is
    # below one ulp and anything above it is rounding.
    return _exact(min(wrong / math.pi, bound), "PSK", m)


def psk_ser_craig(m, es_n0, spec=DEFAULT_QUADRATURE):
    """Exact M-PSK symbol error probability, two-term form.

    ``2 Q(sqrt(2 a)) - (1/pi) * int_{pi/2 - pi/M}^{pi/2} exp(-a / cos^2) dtheta``
    with ``a = es_n0 * sin^2(pi/M)``. Independent of :func:`psk_ser_exact`
    and agrees with it to quadrature precision.
    """
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    if lam == math.inf:
        return _exact(0.0, "PSK", m)
    a = lam * _sin2_pi_over(m)

    def correction(theta):
        return np.exp(-a / np.cos(theta) ** 2)

    overlap = integrate_finite(correction, math.pi / 2 - math.pi / m, math.pi / 2, spec)
    return _exact(2.0 * q_function(math.sqrt(2.0 * a)) - overlap / math.pi, "PSK", m)


def psk_ber_union(m, es_n0):
    """Nearest-neighbour union bound ``2 Q(sqrt(2 es_n0) sin(pi/M))``."""
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    value = 2.0 * q_function(math.sqrt(2.0 * lam * _sin2_pi_over(m))) \
        if lam < math.inf else 0.0
    return _closed(value, "symbol", "approx1", "PSK", m)


def psk_ber_large_m(m, es_n0):
    """Large-M form of the union bound with ``sin(pi/M) ~ pi/M``."""
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    value = 2.0 * q_function(math.sqrt(2.0 * lam * math.pi**2 / m**2)) \
        if lam < math.inf else 0.0
    return _closed(value, "symbol", "approx2", "PSK", m)


# -- QAM ---------------------------------------------------------------------

def _qam_axis_error(m, lam):
    """Per-rail error ``2 (1 - 1/sqrt(M)) Q(sqrt(3 lam / (M - 1)))``."""
    if lam == math.inf:
        return 0.0
    return 2.0 * (1.0 - 1.0 / math.sqrt(m)) * q_function(math.sqrt(lam * (3.0 / (m - 1))))


def qam_ser_exact(m, es_n0):
    """Square M-QAM symbol error probability ``1 - (1 - p)^2``.

    ``p`` is the error probability of one sqrt(M)-PAM rail. The expression
    is exact for even ``k``; for odd ``k`` it is evaluated as written and the
    result carries ``literal=True``.
    """
    k = bits_per_symbol(m)
    lam = _check_snr(es_n0)
    p = _qam_axis_error(m, lam)
    value = min(max(p * (2.0 - p), 0.0), 1.0)  # 1 - (1 - p)^2 without cancellation
    return ErrorRateValue(value, "symbol", "exact", "QAM", int(m),
                          literal=bool(k % 2))


def qam_ber_approx1(m, es_n0):
    """First-order form ``4 (1 - 1/sqrt(M)) Q(sqrt(3 es_n0 / (M - 1)))``."""
    k = bits_per_symbol(m)
    lam = _check_snr(es_n0)
    return _closed(2.0 * _qam_axis_error(m, lam), "symbol", "approx1", "QAM", m,
                   literal=bool(k % 2))


def qam_ber_approx2(m, es_n0):
    """``2 M/(M-1) Q(sqrt(6 es_n0 / (M^2 - 1)))``."""
    k = bits_per_symbol(m)
    lam = _check_snr(es_n0)
    value = 2.0 * m / (m - 1) * q_function(math.sqrt(6.0 * lam / (m * m - 1))) \
        if lam < math.inf else 0.0
    return _closed(value, "symbol", "approx2", "QAM", m, literal=bool(k % 2))


def qam_ber_large_m(m, es_n0):
    """Large-M form ``2 Q(sqrt(6 es_n0 / M^2))``."""
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    value = 2.0 * q_function(math.sqrt(6.0 * lam / (m * m))) if lam < math.inf else 0.0
    return _closed(value, "symbol", "approx3", "QAM", m)


# -- FSK ---------------------------------------------------------------------

def fsk_ser_exact(m, es_n0, spec=DEFAULT_QUADRATURE):
    """Coherent orthogonal M-FSK symbol error probability.

    The correct correlator output is ``N(sqrt(2 es_n0), 1)`` in noise-unit
    scaling and the symbol is right when it beats the ``M - 1`` others, so
    ``P_e = 1 - E[Phi(Y)^(M-1)]``. The complement is integrated directly,
    ``E[1 - Phi(Y)^(M-1)]``, which keeps relative accuracy at high SNR.
    """
    bits_per_symbol(m)
    lam = _check_snr(es_n0)
    if lam == math.inf:
        return _exact(0.0, "FSK", m)

    def loses_to_some_other(y):
        return -np.expm1((m - 1) * np.log1p(-q_function(y)))

    error = integrate_gaussian_weighted(loses_to_some_other, math.sqrt(2.0 * lam), spec)
    return _exact(error, "FSK", m)


def fsk_ber_union(m, es_n0, per_bit_energy=False):
    """Union bound ``(M log2 M / 2) Q(sqrt(lam))`` for orthogonal M-FSK.

    With ``per_bit_energy=False`` the bound is evaluated as written with
    ``lam = es_n0``; at fixed ``es_n0`` it grows with M. With
    ``per_bit_energy=True`` the argument is treated as the per-bit ratio and
    ``lam = log2(M) * es_n0``, so each symbol carries the energy of its k
    bits and the bound falls with M at fixed per-bit SNR.
    """
    k = bits_per_symbol(m)
    lam = _check_snr(es_n0)
    if per_bit_energy:
        lam *= k
    value = m * k / 2.0 * q_function(math.sqrt(lam)) if lam < math.inf else 0.0
    mode = "union_per_bit" if per_bit_energy else "union"
    return _closed(value, "symbol", mode, "FSK", m)


# -- conversions and dispatch --------------------------------------------------

def ser_to_ber(ser, mapping=None):
    """Convert a symbol error probability to a bit error probability.

    Parameters
    ----------
    ser : ErrorRateValue
        Symbol-granularity value.
    mapping : {"gray", "orthogonal"}, optional
        ``"gray"`` divides by k (one bit wrong per nearest-neighbour error).
        ``"orthogonal"`` multiplies by ``(M/2)/(M-1)``, the mean fraction of
        bits wrong when all wrong symbols are equally likely. Defaults to
        gray for PSK/QAM and orthogonal for FSK.
    """
    if ser.granularity != "symbol":
        raise DomainError("ser_to_ber needs a symbol-granularity value")
    if mapping is None:
        mapping = "orthogonal" if ser.scheme == "FSK" else "gray"
    k = bits_per_symbol(ser.m)
    if mapping == "gray":
        factor = 1.0 / k
    elif mapping == "orthogonal":
        factor = (ser.m / 2.0) / (ser.m - 1)
    else:
        raise ConfigurationError(f"unknown bit mapping {mapping!r}", field="mapping")
    return ErrorRateValue(ser.value * factor, "bit", ser.mode, ser.scheme, ser.m,
                          unclamped=ser.unclamped * factor, literal=ser.literal)


_FORMULAS = {
    ("PSK", "exact"): psk_ser_exact,
    ("PSK", "approx1"): psk_ber_union,
    ("PSK", "approx2"): psk_ber_large_m,
    ("QAM", "exact"): qam_ser_exact,
    ("QAM", "approx1"): qam_ber_approx1,
    ("QAM", "approx2"): qam_ber_approx2,
    ("QAM", "approx3"): qam_ber_large_m,
    ("FSK", "exact"): fsk_ser_exact,
    ("FSK", "union"): fsk_ber_union,
    ("FSK", "union_per_bit"): lambda m, lam: fsk_ber_union(m, lam, per_bit_energy=True),
}


def valid_modes(scheme):
    """Analytic modes available for `scheme`."""
    scheme = _scheme(scheme)
    return tuple(mode for s, mode in _FORMULAS if s == scheme)


def _scheme(scheme):
    name = str(scheme).upper()
    if name not in SCHEMES:
        raise ConfigurationError(
            f"unknown scheme {scheme!r}; expected one of {SCHEMES}", field="scheme")
    return name


def symbol_error_probability(scheme, m, es_n0, mode="exact"):
    """Dispatch to the formula for ``(scheme, mode)``.

    The exact QAM value for M = 2 is the antipodal (BPSK) one, since a
    two-point QAM constellation is BPSK; all other combinations call the
    named formula unchanged.
    """
    scheme = _scheme(scheme)
    try:
        formula = _FORMULAS[scheme, mode]
    except KeyError:
        raise ConfigurationError(
            f"mode {mode!r} is not defined for {scheme}; "
            f"choose from {valid_modes(scheme)}", field="mode") from None
    if scheme == "QAM" and mode == "exact" and m == 2:
        bpsk = psk_ser_exact(2, es_n0)
        return ErrorRateValue(bpsk.value, "symbol", "exact", "QAM", 2)
    return formula(m, es_n0)


@dataclass(frozen=True)
class Tradeoff:
    relative_bandwidth: float
    power_trend: str


def tradeoff_table(scheme, m):
    """Bandwidth and power trend of `scheme` at order `m`.

    PSK and QAM occupy a fixed bandwidth and need more power as M grows.
    Orthogonal FSK needs M tones for k bits, so its bandwidth per bit is
    ``M / k`` while the per-bit power stays roughly flat.
    """
    scheme = _scheme(scheme)
    k = bits_per_symbol(m)
    if scheme == "FSK":
        return Tradeoff(relative_bandwidth=m / k, power_trend="flat")
    return Tradeoff(relative_bandwidth=1.0, power_trend="increases_with_m")
