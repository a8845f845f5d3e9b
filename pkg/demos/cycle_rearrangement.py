"""
Shuffling heart cycles without audible seams
============================================

Each cycle of this fixture carries its own chirp, so we can follow cycles
through a reordering. Joints are blended with a crossfade whose shape adapts
to how correlated the two sides are.
"""

import numpy as np

from auscult.cycles import (
    apply_rearrangement,
    fade_generalized,
    plan_rearrangement,
    rearranged_boundaries,
)
from auscult.fixtures import chirp_tagged_cycles
from auscult.rng import RandomStream

# The fade family: r=0 keeps power constant, r=1 keeps amplitude constant.
t = np.linspace(-1, 1, 5)
for r in (0.0, 1.0):
    f, g = fade_generalized(t, r), fade_generalized(-t, r)
    print(f"r={r}: f(t)={np.round(f, 3)}  power sum={np.round(f**2 + g**2, 3)}  amplitude sum={np.round(f + g, 3)}")

signal, bounds = chirp_tagged_cycles(3)
print("boundaries:", bounds.indices.tolist())

plan = plan_rearrangement(bounds.n_cycles, RandomStream(3).child("demo"), mode="cycles")
print("plan:", plan)
out = apply_rearrangement(signal, bounds, plan["order"])
new = rearranged_boundaries(bounds, plan["order"])


def peak_hz(x):
    spec = np.abs(np.fft.rfft(x, n=8192))
    return np.fft.rfftfreq(8192, 1 / signal.sample_rate_hz)[np.argmax(spec)]


before = [peak_hz(signal.samples[a:b]) for a, b in zip(bounds.indices[:-1], bounds.indices[1:])]
after = [peak_hz(out.samples[a:b]) for a, b in zip(new.indices[:-1], new.indices[1:])]
print("peak frequency per cycle before:", np.round(before).tolist())
print("peak frequency per cycle after: ", np.round(after).tolist())
print("length preserved:", len(out) == len(signal))
