"""Waveform and time-frequency primitives shared by the rest of the package.

Every function here is pure: inputs are never modified and no module state
is kept apart from a small cache of band-pass kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal as sps
from scipy.special import i0

__all__ = [
    "InvalidBandError",
    "Signal",
    "Spectrogram",
    "MelSpectrogram",
    "normalize",
    "bandpass",
    "resample",
    "sine_window",
    "stft",
    "istft",
    "mel_filterbank",
    "mel_spectrogram",
    "hz_to_mel",
    "mel_to_hz",
]

#: FIR length at 2 kHz; scaled linearly with the sample rate.
BASE_FIR_TAPS = 1025
BASE_FIR_RATE = 2000.0
#: Design attenuation for band-pass kernels (dB).
FIR_ATTENUATION_DB = 60.0

RESAMPLE_ZERO_CROSSINGS = 16  # 32 taps per phase
RESAMPLE_KAISER_BETA = 8.6
RESAMPLE_ROLLOFF = 0.95


class InvalidBandError(ValueError):
    """Raised when a requested pass band is empty or reaches Nyquist."""


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled real waveform."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples contain NaN or Inf")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate_hz

    @property
    def nyquist(self) -> float:
        return self.sample_rate_hz / 2.0

    def times(self) -> np.ndarray:
        """Sample instants in seconds."""
        return np.arange(len(self)) / self.sample_rate_hz

    def replace(self, samples) -> "Signal":
        return Signal(samples, self.sample_rate_hz)


@dataclass(frozen=True)
class Spectrogram:
    """One-sided complex STFT, indexed ``bins[frame, bin]``."""

    bins: np.ndarray
    window_len: int
    hop: int
    window: np.ndarray = field(repr=False)
    length: int
    sample_rate_hz: float
    center: bool = True

    @property
    def n_frames(self) -> int:
        return self.bins.shape[0]

    def replace(self, bins) -> "Spectrogram":
        return Spectrogram(
            bins=bins,
            window_len=self.window_len,
            hop=self.hop,
            window=self.window,
            length=self.length,
            sample_rate_hz=self.sample_rate_hz,
            center=self.center,
        )


@dataclass(frozen=True)
class MelSpectrogram:
    """Mel-projected power spectrogram, indexed ``bands[frame, mel]``."""

    bands: np.ndarray
    n_mels: int
    fmin_hz: float
    fmax_hz: float
    sample_rate_hz: float
    window_len: int
    hop: int
    mel_scale: str = "slaney"

    @property
    def n_frames(self) -> int:
        return self.bands.shape[0]

    def config(self) -> dict:
        return {
            "n_mels": self.n_mels,
            "fmin_hz": self.fmin_hz,
            "fmax_hz": self.fmax_hz,
            "sample_rate_hz": self.sample_rate_hz,
            "window_len": self.window_len,
            "hop": self.hop,
            "mel_scale": self.mel_scale,
            "window": "sine",
        }


def normalize(signal: Signal) -> Signal:
    """Remove the mean and scale to a peak magnitude of exactly one.

    Constant input (including all zeros) maps to all zeros. Input that is
    already normalized is returned unchanged, so the operation is idempotent
    bit for bit.
    """
    x = signal.samples
    if x.size == 0:
        raise ValueError("cannot normalize an empty signal")
    if np.ptp(x) == 0:
        return signal.replace(np.zeros_like(x))
    peak = np.max(np.abs(x))
    if peak == 1.0 and abs(x.mean()) <= 1e-12:
        return signal.replace(x.copy())
    y = x - x.mean()
    return signal.replace(y / np.max(np.abs(y)))


def _odd(n: int) -> int:
    return n if n % 2 else n + 1


@lru_cache(maxsize=256)
def _bandpass_kernel(fs: float, lo: float, hi: float) -> np.ndarray | None:
    nyq = fs / 2.0
    widths = []
    stop_hi = min(2.0 * hi, 0.99 * nyq)
    lowpass = stop_hi > hi
    if lo > 0:
        widths.append(lo / 2.0)
    if lowpass:
        widths.append(stop_hi - hi)
    if not widths:
        return None
    taps, _ = sps.kaiserord(FIR_ATTENUATION_DB, min(widths) / nyq)
    taps = _odd(max(taps, _odd(int(round(BASE_FIR_TAPS * fs / BASE_FIR_RATE)))))
    window = ("kaiser", sps.kaiser_beta(FIR_ATTENUATION_DB))
    if lo > 0 and lowpass:
        h = sps.firwin(taps, [0.75 * lo, (hi + stop_hi) / 2.0], pass_zero=False, window=window, fs=fs)
    elif lo > 0:
        h = sps.firwin(taps, 0.75 * lo, pass_zero=False, window=window, fs=fs)
    else:
        h = sps.firwin(taps, (hi + stop_hi) / 2.0, window=window, fs=fs)
    h.setflags(write=False)
    return h


def _reflect_pad(x: np.ndarray, before: int, after: int) -> np.ndarray:
    mode = "reflect" if x.size > 1 else "edge"
    return np.pad(x, (before, after), mode=mode)


def bandpass(signal: Signal, lo_hz: float, hi_hz: float) -> Signal:
    """Linear-phase windowed-sinc band-pass filter.

    The Kaiser FIR is long enough to reach 60 dB between ``lo/2`` and ``lo``
    and between ``hi`` and ``min(2*hi, 0.99*nyquist)``, with a floor of 1025
    taps at 2 kHz. Edges are reflected so the output has the input length
    and no group delay.

    Raises
    ------
    InvalidBandError
        If ``hi_hz`` reaches Nyquist or the band is empty.
    """
    nyq = signal.nyquist
    if not 0 <= lo_hz < hi_hz:
        raise InvalidBandError(f"invalid band ({lo_hz}, {hi_hz}) Hz")
    if hi_hz >= nyq:
        raise InvalidBandError(f"upper edge {hi_hz} Hz must be below Nyquist ({nyq} Hz)")
    h = _bandpass_kernel(signal.sample_rate_hz, float(lo_hz), float(hi_hz))
    x = signal.samples
    if h is None or not np.any(x):
        return signal.replace(x.copy())
    half = h.size // 2
    padded = _reflect_pad(x, half, half)
    return signal.replace(sps.oaconvolve(padded, h, mode="valid"))


def _kaiser(u: np.ndarray, beta: float) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) <= 1.0
    out[inside] = i0(beta * np.sqrt(1.0 - u[inside] ** 2)) / i0(beta)
    return out


def _sinc_interpolate(x: np.ndarray, positions: np.ndarray, cutoff: float) -> np.ndarray:
    """Band-limited evaluation of ``x`` at fractional sample positions."""
    half = int(np.ceil(RESAMPLE_ZERO_CROSSINGS / cutoff))
    pad = half + 2
    xp = _reflect_pad(x, pad, pad)
    out = np.empty(positions.size)
    offsets = np.arange(-half + 1, half + 1)
    chunk = max(1, 2**20 // offsets.size)
    for start in range(0, positions.size, chunk):
        pos = positions[start:start + chunk]
        base = np.floor(pos).astype(np.int64)
        idx = base[:, None] + offsets[None, :]
        dist = pos[:, None] - idx
        kern = cutoff * np.sinc(cutoff * dist) * _kaiser(dist / half, RESAMPLE_KAISER_BETA)
        out[start:start + chunk] = np.sum(kern * xp[idx + pad], axis=1)
    return out


def resample(signal: Signal, target_rate_hz: float) -> Signal:
    """Change the sample rate with a Kaiser-windowed sinc interpolator.

    The kernel spans 16 zero crossings on each side (32 taps per output
    phase) and is widened when decimating so that it also acts as the
    anti-aliasing filter. Output length is ``round(len * target / source)``.
    """
    if not target_rate_hz > 0:
        raise ValueError(f"target rate must be positive, got {target_rate_hz}")
    source = signal.sample_rate_hz
    if target_rate_hz == source:
        return Signal(signal.samples.copy(), source)
    ratio = target_rate_hz / source
    n_out = int(round(len(signal) * ratio))
    positions = np.arange(n_out) / ratio
    cutoff = min(1.0, ratio) * RESAMPLE_ROLLOFF
    return Signal(_sinc_interpolate(signal.samples, positions, cutoff), target_rate_hz)


def sine_window(n: int) -> np.ndarray:
    """``w(n) = sin(pi (n + 1/2) / N)``; squares overlap-add to a constant."""
    return np.sin(np.pi * (np.arange(n) + 0.5) / n)


def _centre_padding(length: int, window_len: int, hop: int) -> tuple[int, int, int]:
    n_frames = -(-length // hop) + 1
    left = window_len // 2
    right = (n_frames - 1) * hop + window_len - length - left
    return left, right, n_frames


def stft(signal: Signal, window_len: int, hop: int, center: bool = True) -> Spectrogram:
    """Short-time Fourier transform with a sine window.

    ``bins[t, k] = sum_n w(n) x(n + tH) exp(-2j pi k n / N)``. With
    ``center`` the signal is reflect-padded by ``N/2`` in front and enough at
    the back that every sample is covered by full frames; without it, frames
    start at sample 0 and a signal shorter than one window becomes a single
    zero-padded frame.
    """
    if window_len < 2 or hop < 1:
        raise ValueError("window_len must be >= 2 and hop >= 1")
    if hop > window_len:
        raise ValueError(f"hop {hop} exceeds window length {window_len}")
    x = signal.samples
    if center:
        left, right, _ = _centre_padding(x.size, window_len, hop)
        x = _reflect_pad(x, left, right)
    elif x.size < window_len:
        x = np.pad(x, (0, window_len - x.size))
    window = sine_window(window_len)
    frames = np.lib.stride_tricks.sliding_window_view(x, window_len)[::hop]
    bins = np.fft.rfft(frames * window, n=window_len, axis=1)
    return Spectrogram(
        bins=bins,
        window_len=window_len,
        hop=hop,
        window=window,
        length=len(signal),
        sample_rate_hz=signal.sample_rate_hz,
        center=center,
    )


def istft(spec: Spectrogram) -> Signal:
    """Least-squares overlap-add inverse of :func:`stft`.

    Raises
    ------
    ValueError
        If the window/hop pair leaves any output sample without window
        support, or the bin count does not match the window length.
    """
    n, hop, window = spec.window_len, spec.hop, spec.window
    if spec.bins.ndim != 2 or spec.bins.shape[1] != n // 2 + 1:
        raise ValueError(f"expected {n // 2 + 1} frequency bins for window length {n}")
    if hop > n or window.shape != (n,):
        raise ValueError("window and hop do not allow reconstruction")
    n_frames = spec.n_frames
    total = (n_frames - 1) * hop + n
    frames = np.fft.irfft(spec.bins, n=n, axis=1) * window
    out = np.zeros(total)
    norm = np.zeros(total)
    wsq = window**2
    for t in range(n_frames):
        out[t * hop:t * hop + n] += frames[t]
        norm[t * hop:t * hop + n] += wsq
    start = n // 2 if spec.center else 0
    stop = start + spec.length
    out, norm = out[start:stop], norm[start:stop]
    if out.size < spec.length or np.any(norm[: out.size] < 1e-12):
        raise ValueError("window and hop do not allow reconstruction")
    return Signal(out / norm, spec.sample_rate_hz)


def hz_to_mel(freq_hz):
    """Slaney mel scale: linear below 1 kHz, logarithmic above."""
    f = np.asarray(freq_hz, dtype=np.float64)
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    with np.errstate(divide="ignore"):
        log_part = min_log_mel + np.log(np.maximum(f, min_log_hz) / min_log_hz) / logstep
    return np.where(f >= min_log_hz, log_part, f / f_sp)


def mel_to_hz(mels):
    m = np.asarray(mels, dtype=np.float64)
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    return np.where(m >= min_log_mel, min_log_hz * np.exp(logstep * (m - min_log_mel)), f_sp * m)


def mel_filterbank(sample_rate_hz: float, n_fft: int, n_mels: int,
                   fmin_hz: float = 0.0, fmax_hz: float | None = None) -> np.ndarray:
    """Area-normalised triangular filters of shape ``(n_mels, n_fft//2 + 1)``."""
    if fmax_hz is None:
        fmax_hz = sample_rate_hz / 2.0
    fft_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate_hz)
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), n_mels + 2))
    lower, centre, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (fft_freqs[None, :] - lower) / (centre - lower)
    falling = (upper - fft_freqs[None, :]) / (upper - centre)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    return weights * (2.0 / (upper - lower))


def mel_spectrogram(signal: Signal, sample_rate_hz: float = 4000.0, window_len: int = 1024,
                    hop: int = 256, n_mels: int = 80) -> MelSpectrogram:
    """Mel filterbank applied to the sine-window power spectrogram.

    The signal is resampled to ``sample_rate_hz`` first if needed. The
    filterbank spans 0 Hz to Nyquist.
    """
    if signal.sample_rate_hz != sample_rate_hz:
        signal = resample(signal, sample_rate_hz)
    power = np.abs(stft(signal, window_len, hop).bins) ** 2
    fb = mel_filterbank(sample_rate_hz, window_len, n_mels)
    return MelSpectrogram(
        bands=power @ fb.T,
        n_mels=n_mels,
        fmin_hz=0.0,
        fmax_hz=sample_rate_hz / 2.0,
        sample_rate_hz=sample_rate_hz,
        window_len=window_len,
        hop=hop,
    )
