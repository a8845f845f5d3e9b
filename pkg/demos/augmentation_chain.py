"""
One augmentation, drawn then applied
====================================

Every random choice is made up front into a JSON-ready plan. Applying the
plan uses no randomness, so a stored plan reproduces its output exactly.
"""

import json

import numpy as np

from auscult.augment import AugmentConfig, apply_plan, draw_plan
from auscult.fixtures import make_fixture_records
from auscult.rng import RandomStream

record = make_fixture_records(seed=1, count=2)[1]        # an "abnormal" synthetic pair
print(record.id, record.label, f"{record.pcg.duration:.2f} s at {record.pcg.sample_rate_hz:.0f} Hz")

plan = draw_plan(AugmentConfig(), RandomStream(2024).child("demo"))
for channel in ("pcg", "ecg"):
    fired = [s["stage"] for s in plan[channel] if s["fired"]]
    print(f"{channel} stages fired: {', '.join(fired) or 'none'}")

# No noise bank is given, so the external-noise stage is skipped even when its
# gate fires; the applied report says which stages actually ran.
out, applied = apply_plan(record, plan)
print("applied:", applied)
print(f"lengths before/after: {len(record.pcg)} -> {len(out.pcg)} (stretch keeps PCG and ECG aligned)")

# A JSON round trip of the plan replays bit for bit.
again, _ = apply_plan(record, json.loads(json.dumps(plan)))
print("replay identical:", np.array_equal(out.pcg.samples, again.pcg.samples))
