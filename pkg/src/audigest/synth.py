"""Seeded synthetic pseudo-songs for end-to-end evaluation.

Each song draws frames from a per-song three-component Gaussian mixture in
carrier-amplitude space and renders them as amplitude-modulated, lightly
detuned tone stacks, so the full audio -> features -> summarize ->
synthesize -> model pipeline gets exercised on material with known
structure. The components differ in timbre (dominant carrier) and loudness
tier, occupy distinct sections of the timeline joined by crossfade zones,
and quiet spectrally-wandering intro/outro sections bracket the song. The
layout mimics what makes contiguous windows unrepresentative of real
songs: edge content is atypical and any single section misstates the
song-wide loudness and spectral mix.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import TARGET_RATE, AudioClip, write_audio
from .features import frame_length_samples

CARRIERS_HZ = (440.0, 1320.0, 3960.0)
COMPONENT_LOUDNESS = (0.95, 0.25, 0.60)
DETUNE = 0.015
# two tone states per edge, each pair in distinct mel bands; the intro and
# outro use different pairs so neither forms one large coherent term block
INTRO_TONES_HZ = (5600.0, 6800.0)
OUTRO_TONES_HZ = (7800.0, 9400.0)
EDGE_AMP = 0.02
NOISE_REL = 0.01
STAY_PROB = 0.85
# section layout fractions: intro, A, A->B, B, B->C, C, outro
LAYOUT = (1 / 8, 2 / 9, 1 / 24, 5 / 18, 1 / 24, 1 / 6, 1 / 8)


def _component_means(rng: np.random.Generator) -> np.ndarray:
    """Carrier amplitude pattern per component: one dominant carrier plus
    bleed, scaled to the component's loudness tier."""
    base = np.full((3, 3), 0.12)
    for c in range(3):
        base[c, c] = 0.80
    base += rng.uniform(-0.03, 0.03, size=(3, 3))
    base *= np.array(COMPONENT_LOUDNESS)[:, None] / base.sum(axis=1, keepdims=True)
    return base


def _section_priors(n_frames: int) -> np.ndarray:
    """Per-frame component priors from the blocky section layout."""
    bounds = np.cumsum(np.round(np.array(LAYOUT) * n_frames).astype(int))
    bounds[-1] = n_frames
    priors = np.full((n_frames, 3), 0.04)
    section_comp = (None, 0, (0, 1), 1, (1, 2), 2, None)
    start = 0
    for seg, stop in enumerate(bounds):
        comp = section_comp[seg]
        if comp is not None:
            if isinstance(comp, tuple):
                # linear crossfade between the two components
                ramp = np.linspace(0.0, 1.0, max(stop - start, 1))
                priors[start:stop, comp[0]] += 0.92 * (1.0 - ramp)
                priors[start:stop, comp[1]] += 0.92 * ramp
            else:
                priors[start:stop, comp] += 0.92
        start = stop
    return priors / priors.sum(axis=1, keepdims=True)


def edge_frame_count(n_frames: int) -> int:
    """Frames in each of the intro and outro sections."""
    return int(round(LAYOUT[0] * n_frames))


def render_song(seed_seq, n_frames: int, frame_len_s: float = 0.10,
                sample_rate: int = TARGET_RATE) -> AudioClip:
    """One pseudo-song of exactly ``n_frames`` whole frames."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    flen = frame_length_samples(frame_len_s, sample_rate)
    n_edge = edge_frame_count(n_frames)
    if n_frames - 2 * n_edge < 6:
        raise ValueError("song too short for intro/body/outro structure")
    means = _component_means(rng)
    priors = _section_priors(n_frames)

    t = np.arange(flen) / sample_rate
    out = np.empty(n_frames * flen)
    comp = 0
    amps = means[comp].copy()
    detune = np.zeros(3)
    for i in range(n_frames):
        if i < n_edge or i >= n_frames - n_edge:
            # quiet two-state intro/outro: atypical for the song but not
            # self-identical
            tones = INTRO_TONES_HZ if i < n_edge else OUTRO_TONES_HZ
            tone_hz = tones[rng.integers(2)] + rng.uniform(-40.0, 40.0)
            level = EDGE_AMP * rng.uniform(0.9, 1.1)
            frame = level * np.sin(2.0 * np.pi * tone_hz * t)
            frame = frame + 2.0 * NOISE_REL * EDGE_AMP * rng.standard_normal(flen)
        else:
            if rng.random() > STAY_PROB:
                comp = int(rng.choice(3, p=priors[i]))
            # slow random walks pulled toward the component pattern; a
            # contiguous window sees only a couple of independent states
            # while scattered picks decorrelate
            amps = 0.95 * amps + 0.05 * means[comp] + 0.04 * rng.standard_normal(3)
            detune = 0.97 * detune + 0.008 * rng.standard_normal(3)
            levels = np.clip(amps, 0.005, 0.9)
            levels = levels * min(1.0, 0.95 / levels.sum())
            factors = 1.0 + np.clip(detune, -DETUNE, DETUNE)
            frame = levels @ np.sin(2.0 * np.pi * np.outer(np.array(CARRIERS_HZ) * factors, t))
            # noise rides at a fixed level below the signal so quiet
            # sections are not relatively noisier than loud ones
            frame = frame + NOISE_REL * levels.sum() * rng.standard_normal(flen)
        out[i * flen : (i + 1) * flen] = frame
    np.clip(out, -1.0, 1.0, out=out)
    return AudioClip(out, sample_rate)


def write_corpus(out_dir, n_songs: int, seed: int, n_frames: int = 360,
                 frame_len_s: float = 0.10) -> Path:
    """Render a corpus to WAV files plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["# synthetic corpus"]
    for i in range(n_songs):
        clip = render_song([seed, i], n_frames, frame_len_s)
        name = f"song{i:03d}.wav"
        write_audio(clip, out_dir / name)
        lines.append(f"song{i:03d}, {name}")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
