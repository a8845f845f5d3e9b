"""
Training a toy ECG-conditioned PCG vocoder
==========================================

A small dilated-convolution denoiser learns to predict the noise added to
PCG crops, conditioned on the ECG's mel spectrogram and the record label.
This run is short (about a minute on one CPU core); a longer run lowers the
loss further.
"""

import numpy as np
from scipy.signal import welch

from auscult.ddpm import EpsilonPredictor, TrainConfig, reverse_sample, train_toy_denoiser
from auscult.ddpm.train import prepare_ecg
from auscult.dsp import mel_spectrogram
from auscult.fixtures import make_fixture_records
from auscult.records import LABELS
from auscult.rng import RandomStream

config = TrainConfig(steps=300, eval_every=50)
records = make_fixture_records(seed=7, count=32)
result = train_toy_denoiser(records, config, RandomStream(0).child("train"))
for step, loss in result.val_losses:
    print(f"step {step:4d}  validation loss {loss:.3f}")

# Generate 1.5 s of PCG from the ECG of a record the model never saw.
target = make_fixture_records(seed=99, count=1)[0]
rate = config.sample_rate_hz
mel = mel_spectrogram(prepare_ecg(target.ecg, rate), rate, config.window_len, config.hop, config.n_mels)
y = reverse_sample(EpsilonPredictor(result.model, LABELS.index(target.label)), mel.bands,
                   config.schedule, RandomStream(1).child("sample"), int(1.5 * rate))
f, p = welch(y, rate, nperseg=1024)
print(f"generated {y.size} samples; {p[f < 500].sum() / p.sum():.1%} of energy below 500 Hz")
