"""
Keeping a Bell state entangled
==============================

A Bell state coupled to fifteen independent Ohmic baths loses its
entanglement within a fraction of a time unit.  Decoupling fields with the
tuple (1,2,4,8) slow this down, and the faster tuple (2,4,8,16) does better.
Each run takes a few seconds.
"""
import numpy as np

from cdd2q.experiments import run_scenario

times = [0.2, 0.5, 1.0, 2.0, 3.0, 4.0]
for name in ("fig1-state-diffbaths", "fig2-state-commonbath"):
    print(name)
    print("  variant          " + "".join(f"t={t:<7}" for t in times))
    for variant in ("nocontrol", "control-weak", "control-strong"):
        series, _ = run_scenario(name, {"variant": variant})
        idx = [int(np.argmin(np.abs(series.times - t))) for t in times]
        print(f"  {variant:16s} " + "".join(f"{series.concurrence[i]:<9.4f}" for i in idx))
    print()
