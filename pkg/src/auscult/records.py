from __future__ import annotations

from dataclasses import dataclass, replace

from .cycles import CycleBoundaries
from .dsp import Signal

LABELS = ("normal", "abnormal", "unsure")


@dataclass(frozen=True)
class PairedRecord:
    """A PCG recording, optionally with its synchronised ECG."""

    id: str
    pcg: Signal
    ecg: Signal | None = None
    label: str = "normal"
    cycles: CycleBoundaries | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}; expected one of {LABELS}")
        if self.ecg is not None:
            period = max(1.0 / self.pcg.sample_rate_hz, 1.0 / self.ecg.sample_rate_hz)
            if abs(self.pcg.duration - self.ecg.duration) >= period:
                raise ValueError(
                    f"record {self.id}: PCG lasts {self.pcg.duration:.4f} s but ECG "
                    f"{self.ecg.duration:.4f} s"
                )
        if self.cycles is not None:
            self.cycles.check_within(len(self.pcg))

    def replace(self, **changes) -> "PairedRecord":
        return replace(self, **changes)
