"""
Bandwidth against power
=======================

PSK and QAM keep the bandwidth fixed and need more energy per bit as M
grows. Orthogonal FSK spends bandwidth instead: more tones, but less
energy per bit for the same error rate.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from scipy.optimize import brentq

from marylink import analytic_curve, tradeoff_table

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(OUT, exist_ok=True)
TARGET = 1e-5


def snr_for(scheme, m, mode):
    """SNR in dB where the analytic BER crosses TARGET."""
    def gap(x):
        return analytic_curve(scheme, m, [x], mode).values[0] - TARGET
    return brentq(gap, -5.0, 40.0, xtol=1e-6)


rows = []
for scheme, mode in [("PSK", "exact"), ("QAM", "exact"), ("FSK", "union_per_bit")]:
    for m in (2, 4, 16):
        t = tradeoff_table(scheme, m)
        rows.append((scheme, m, t.relative_bandwidth, snr_for(scheme, m, mode)))
        print(f"{scheme:3s} M={m:2d}  bandwidth x{t.relative_bandwidth:5.2f}  "
              f"{t.power_trend:17s}  SNR for BER 1e-5: {rows[-1][3]:5.2f} dB")

fig, ax = plt.subplots()
for scheme in ("PSK", "QAM", "FSK"):
    pts = [(bw, snr, m) for s, m, bw, snr in rows if s == scheme]
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=scheme)
    for bw, snr, m in pts:
        ax.annotate(f"M={m}", (bw, snr), textcoords="offset points", xytext=(4, 4))
ax.set_xlabel("relative bandwidth")
ax.set_ylabel("SNR needed for BER 1e-5 (dB)")
ax.legend()
fig.savefig(os.path.join(OUT, "tradeoff.png"), dpi=120)
