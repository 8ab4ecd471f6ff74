"""
Simulation against theory
=========================

Random bits go through the modem and an AWGN channel until 100 bit
errors have been seen; the simulated symbol error rate is then set against
the exact value with its 99% Wilson interval.
"""

import os
import time

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from marylink import DEFAULT_GRID_DB, analytic_curve, sweep

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(OUT, exist_ok=True)

fig, ax = plt.subplots()
for scheme, m in [("PSK", 4), ("QAM", 16), ("FSK", 2)]:
    t0 = time.perf_counter()
    sim = sweep(scheme, m, DEFAULT_GRID_DB, seed=7, granularity="symbol", workers=4)
    theory = analytic_curve(scheme, m, DEFAULT_GRID_DB, granularity="symbol")
    print(f"{scheme}{m}: {time.perf_counter() - t0:.1f} s")
    for est, p in zip(sim.estimates, theory.values):
        lo, hi = est.interval(0.99, "symbol")
        flag = "" if lo <= p <= hi else "  <- outside"
        print(f"  {est.eb_n0_db:4.0f} dB  sim {est.ser:.3e}  exact {p:.3e}"
              f"  ({est.symbols_sent} symbols){flag}")
    line, = ax.semilogy(theory.snr_db, theory.values, label=f"{scheme}{m} exact")
    keep = [i for i, v in enumerate(sim.values) if v > 0]
    ax.errorbar([sim.snr_db[i] for i in keep], [sim.values[i] for i in keep],
                yerr=[[sim.values[i] - sim.ci_low[i] for i in keep],
                      [sim.ci_high[i] - sim.values[i] for i in keep]],
                fmt="o", color=line.get_color(), ms=4)

ax.set_xlabel("SNR (dB)")
ax.set_ylabel("SER")
ax.legend()
fig.savefig(os.path.join(OUT, "monte_carlo.png"), dpi=120)
