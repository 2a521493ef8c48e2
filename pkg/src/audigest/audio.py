"""WAV decoding, silence trimming, summary synthesis, and WAV writing.

Everything downstream works on mono float signals at 22050 Hz; this module
is the only place that touches files or sample formats.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from pathlib import Path

import numpy as np
from scipy import signal as _signal
from scipy.io import wavfile

from .errors import DecodeError

TARGET_RATE = 22050

# 10 ms analysis windows for the silence gate, dBFS relative to 1.0 full scale
TRIM_WINDOW_S = 0.010
DEFAULT_TRIM_DB = -60.0


@dataclass
class AudioClip:
    """Mono PCM signal: float64 amplitudes in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def _to_float(data: np.ndarray) -> np.ndarray:
    """Map integer PCM to [-1, 1] floats; floats pass through."""
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        # scipy loads 24-bit PCM shifted into the full int32 range
        return data.astype(np.float64) / 2147483648.0
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float64)
    raise DecodeError(f"unsupported sample format: {data.dtype}")


@lru_cache(maxsize=8)
def _resample_taps(up: int, down: int) -> np.ndarray:
    # Windowed-sinc low-pass, 64 zero crossings per phase. Kaiser beta 12
    # puts the stopband around -120 dB, far below the 16-bit noise floor.
    m = max(up, down)
    return _signal.firwin(2 * 64 * m + 1, 1.0 / m, window=("kaiser", 12.0))


def resample(samples: np.ndarray, rate_in: int, rate_out: int) -> np.ndarray:
    """Band-limited polyphase resampling."""
    if rate_in == rate_out:
        return samples
    g = gcd(rate_in, rate_out)
    up, down = rate_out // g, rate_in // g
    return _signal.resample_poly(samples, up, down, window=_resample_taps(up, down))


def load_audio(path) -> AudioClip:
    """Decode a RIFF/WAVE file to a mono clip at 22050 Hz.

    Accepts 8/16/24/32-bit integer and 32-bit float PCM with one or two
    channels. Stereo is downmixed by per-sample channel average before
    resampling.
    """
    path = Path(path)
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise DecodeError(f"{path}: zero-length audio")
    if data.ndim == 2:
        if data.shape[1] > 2:
            raise DecodeError(f"{path}: {data.shape[1]} channels (only 1-2 supported)")
        data = _to_float(data).mean(axis=1)
    else:
        data = _to_float(data)
    data = resample(data, int(rate), TARGET_RATE)
    np.clip(data, -1.0, 1.0, out=data)
    return AudioClip(data, TARGET_RATE)


def trim_silence(clip: AudioClip, threshold_db: float = DEFAULT_TRIM_DB):
    """Strip leading/trailing runs of sub-threshold 10 ms windows.

    Returns ``(trimmed, all_silent)``. When every window is below the
    threshold the original clip is returned unchanged and the flag is True.
    """
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative (dBFS)")
    win = max(1, int(TRIM_WINDOW_S * clip.sample_rate))
    x = clip.samples
    limit = 10.0 ** (threshold_db / 20.0)
    n_full = len(x) // win
    rms = np.sqrt((x[: n_full * win].reshape(n_full, win) ** 2).mean(axis=1))
    loud = rms >= limit
    tail = x[n_full * win :]
    if len(tail):
        loud = np.append(loud, np.sqrt(np.mean(tail * tail)) >= limit)
    n_win = len(loud)
    if not loud.any():
        return clip, True
    first = int(np.argmax(loud))
    last = int(n_win - 1 - np.argmax(loud[::-1]))
    out = x[first * win : min((last + 1) * win, len(x))]
    return AudioClip(out, clip.sample_rate), False


def synthesize_summary(clip: AudioClip, selection, frame_len_samples: int) -> AudioClip:
    """Concatenate the selected frames' sample spans in temporal order.

    ``selection`` may be a SummarySelection or a bare index sequence;
    either way frames are laid back in ascending frame order.
    """
    if frame_len_samples <= 0:
        raise ValueError("frame_len_samples must be positive")
    indices = np.asarray(getattr(selection, "frame_indices", selection), dtype=np.int64)
    if len(indices) == 0:
        raise ValueError("empty selection")
    if indices.max() * frame_len_samples + frame_len_samples > len(clip.samples):
        raise ValueError("frame index out of range for this clip")
    ordered = np.sort(indices)
    spans = [clip.samples[i * frame_len_samples : (i + 1) * frame_len_samples] for i in ordered]
    return AudioClip(np.concatenate(spans), clip.sample_rate)


def _quantize16(x: np.ndarray) -> np.ndarray:
    # clamp, then round half away from zero so the write/load round trip
    # stays within one 1/32768 step
    y = np.clip(x, -1.0, 1.0) * 32768.0
    q = np.copysign(np.floor(np.abs(y) + 0.5), y)
    return np.clip(q, -32768, 32767).astype(np.int16)


def write_audio(clip: AudioClip, path) -> None:
    """Write 16-bit PCM mono RIFF/WAVE at the clip's sample rate."""
    pcm = _quantize16(clip.samples)
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(clip.sample_rate)
        fh.writeframes(pcm.tobytes())
