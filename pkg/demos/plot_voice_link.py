"""
Sending a voice stand-in over the link
======================================

A 12.5 s syllable-gated tone and chirp is serialised to bits, sent at
6 dB and rebuilt. Pass a WAV path on the command line to use a real
recording instead (16-bit mono PCM).
"""

import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from marylink import transmit_pipeline, voice_fixture, wav_read, wav_write

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(OUT, exist_ok=True)

source = wav_read(sys.argv[1]) if len(sys.argv) > 1 else voice_fixture()
wav_write(os.path.join(OUT, "original.wav"), source)

# %%
# Each bit error flips one bit of a 16-bit word, so an error in the sign
# or top bits shows up as a full-scale click while low bits barely matter.
links = [("PSK", 2), ("FSK", 2), ("QAM", 16), ("FSK", 16)]
fig, axes = plt.subplots(len(links) + 1, 1, sharex=True, figsize=(8, 9))
t = np.arange(len(source)) / source.sample_rate_hz
axes[0].plot(t, source.samples, lw=0.3)
axes[0].set_title("original")
for ax, (scheme, m) in zip(axes[1:], links):
    out, report = transmit_pipeline(source, scheme, m, 6.0, seed=1)
    wav_write(os.path.join(OUT, f"{scheme.lower()}{m}_6db.wav"), out)
    print(f"{scheme}{m}: {report.bit_errors} bit errors, BER {report.ber:.2e}, "
          f"sample MSE {report.sample_mse:.3g}")
    ax.plot(t, out.samples, lw=0.3)
    ax.set_title(f"{scheme} M={m}, 6 dB")
axes[-1].set_xlabel("time (s)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "voice_link.png"), dpi=120)

# %%
# Distortion falls off quickly with SNR.
for snr in range(0, 10, 3):
    mse = [transmit_pipeline(source, "PSK", 2, float(snr), seed=s)[1].sample_mse
           for s in range(5)]
    print(f"PSK2 {snr} dB: median sample MSE {np.median(mse):.3g}")
