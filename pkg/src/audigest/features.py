"""Frame-level feature views of a clip.

Three views feed the rest of the toolkit: 20-coefficient MFCCs (the
summarizers' working representation), the log of a 26-band mel spectrogram,
and the raw one-dimensional amplitude stream. The MFCC/log-mel front end is
fixed: Hann window, zero-pad to the next power of two, magnitude-squared
spectrum, triangular mel filterbank spanning 0 Hz to Nyquist, log with a
small additive floor, then (for MFCC only) an orthonormal DCT-II.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct

from .audio import AudioClip

LOG_FLOOR = 1e-10
N_MEL_BANDS = 26
N_MFCC = 20
CANONICAL_FRAMES = (0.05, 0.10, 0.50)


@dataclass
class FeatureSequence:
    """Ordered fixed-dimension feature vectors, one per frame.

    ``frame_len_s`` is 0.0 for the raw per-sample view.
    """

    vectors: np.ndarray
    frame_len_s: float

    def __post_init__(self):
        self.vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or len(self.vectors) == 0:
            raise ValueError("vectors must be a non-empty (n, dim) array")
        if not np.isfinite(self.vectors).all():
            raise ValueError("feature vectors must be finite")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class MelFilterbank:
    weights: np.ndarray  # (n_bands, n_fft // 2 + 1)
    sample_rate: int
    n_fft: int

    @property
    def n_bands(self) -> int:
        return self.weights.shape[0]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=16)
def mel_filterbank(sample_rate: int, n_fft: int, n_bands: int = N_MEL_BANDS) -> MelFilterbank:
    """Triangular filters with 50% overlap, equally spaced on the mel scale."""
    nyquist = sample_rate / 2.0
    edges = mel_to_hz(np.linspace(0.0, float(hz_to_mel(nyquist)), n_bands + 2))
    edges[0], edges[-1] = 0.0, nyquist
    freqs = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    lower, center, upper = edges[:-2], edges[1:-1], edges[2:]
    rise = (freqs[None, :] - lower[:, None]) / (center - lower)[:, None]
    fall = (upper[:, None] - freqs[None, :]) / (upper - center)[:, None]
    weights = np.maximum(0.0, np.minimum(rise, fall))
    weights.setflags(write=False)
    return MelFilterbank(weights, sample_rate, n_fft)


def frame_length_samples(frame_len_s: float, sample_rate: int) -> int:
    return int(frame_len_s * sample_rate)


def frame_signal(clip: AudioClip, frame_len_s: float) -> np.ndarray:
    """Split into contiguous non-overlapping frames; the tail is discarded.

    Returns a (n_frames, frame_len_samples) view of the clip.
    """
    if frame_len_s <= 0:
        raise ValueError("frame_len_s must be positive")
    if frame_len_s not in CANONICAL_FRAMES:
        warnings.warn(f"non-canonical frame size {frame_len_s}s", stacklevel=2)
    flen = frame_length_samples(frame_len_s, clip.sample_rate)
    n = len(clip.samples) // flen
    if n == 0:
        raise ValueError(f"clip shorter than one {frame_len_s}s frame")
    return clip.samples[: n * flen].reshape(n, flen)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _log_mel_frames(frames: np.ndarray, sample_rate: int) -> np.ndarray:
    flen = frames.shape[1]
    n_fft = _next_pow2(flen)
    window = np.hanning(flen)
    spectrum = np.abs(np.fft.rfft(frames * window, n_fft)) ** 2
    bank = mel_filterbank(sample_rate, n_fft)
    return np.log(spectrum @ bank.weights.T + LOG_FLOOR)


def mfcc(clip: AudioClip, frame_len_s: float, n_coeffs: int = N_MFCC) -> FeatureSequence:
    """First ``n_coeffs`` MFCCs (coefficient 0 included) per frame."""
    frames = frame_signal(clip, frame_len_s)
    log_bands = _log_mel_frames(frames, clip.sample_rate)
    coeffs = dct(log_bands, type=2, norm="ortho", axis=1)[:, :n_coeffs]
    return FeatureSequence(coeffs, frame_len_s)


def log_mel(clip: AudioClip, frame_len_s: float = 0.05) -> FeatureSequence:
    """Log 26-band mel spectrogram, 0.05 s frames by default."""
    frames = frame_signal(clip, frame_len_s)
    return FeatureSequence(_log_mel_frames(frames, clip.sample_rate), frame_len_s)


def raw_sample_stream(clip: AudioClip) -> FeatureSequence:
    """Each amplitude as a one-dimensional feature vector."""
    if len(clip.samples) == 0:
        raise ValueError("empty clip")
    return FeatureSequence(clip.samples.reshape(-1, 1), 0.0)


def save_features(seq: FeatureSequence, path) -> None:
    """Binary cache; round-trips bit-exactly."""
    np.savez(path, vectors=seq.vectors, frame_len_s=np.float64(seq.frame_len_s))


def load_features(path) -> FeatureSequence:
    with np.load(path) as data:
        return FeatureSequence(data["vectors"], float(data["frame_len_s"]))
