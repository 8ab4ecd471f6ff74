"""
Baseband M-ary PSK, QAM and FSK over AWGN.

Closed-form and integral error probabilities, a vectorised modem, seeded
noise, Monte Carlo estimation with Wilson intervals and an audio payload
pipeline. See ``marylink.cli`` for the command-line front end.
"""

__version__ = "0.1.0"

from .analysis import (
    ErrorRateValue,
    SnrSpec,
    axis_to_snr,
    fsk_ber_union,
    fsk_ser_exact,
    psk_ber_large_m,
    psk_ber_union,
    psk_ser_craig,
    psk_ser_exact,
    qam_ber_approx1,
    qam_ber_approx2,
    qam_ber_large_m,
    qam_ser_exact,
    ser_to_ber,
    symbol_error_probability,
    tradeoff_table,
    valid_modes,
)
from .channel import NoiseSpec, awgn, noise_spec_from_snr
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    MaryLinkError,
    UnsupportedFormatError,
    WavParseError,
)
from .modem import SUPPORTED_ORDERS, BitStream, Constellation, Modem
from .montecarlo import (
    DEFAULT_GRID_DB,
    BerCurve,
    BerEstimate,
    StopCriteria,
    analytic_curve,
    estimate_ber,
    sweep,
    wilson_interval,
)
from .numerics import QuadratureSpec, integrate_finite, integrate_gaussian_weighted, q_function
from .payload import (
    AudioPayload,
    TransmissionReport,
    transmit_pipeline,
    voice_fixture,
    wav_read,
    wav_write,
)
