"""Summary selection: five phrase-ranking methods, the Gaussian sampler,
and the continuous baselines, all behind one orchestration entry point.

Selections are sets of frame indices into the non-overlapping framing of
the input clip; synthesis lays the frames back in temporal order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels, rankers
from .audio import AudioClip
from .errors import SummarizeError
from .features import FeatureSequence, frame_length_samples, frame_signal, mfcc
from .gaussian import estimate_sgm
from .lexicon import assign_terms, build_phrases, build_vocabulary, pairwise_cosine

PHRASE_METHODS = ("grasshopper", "lexrank", "lsa", "mmr", "support-sets")
FIXED_METHODS = ("beginning", "middle", "end")
METHODS = ("gaussian-sampler",) + PHRASE_METHODS + ("avs",) + FIXED_METHODS


@dataclass
class SummarySelection:
    """Chosen frame indices plus the configuration that produced them."""

    frame_indices: np.ndarray
    frame_len_s: float
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = np.asarray(self.frame_indices, dtype=np.int64)
        if len(idx) == 0:
            raise ValueError("selection cannot be empty")
        if (np.diff(idx) <= 0).any():
            raise ValueError("frame indices must be strictly increasing")
        self.frame_indices = idx

    @property
    def duration_s(self) -> float:
        return len(self.frame_indices) * self.frame_len_s


@dataclass
class SummaryConfig:
    """Validated bundle of method name, durations, and method parameters."""

    method: str
    duration_s: float
    frame_len_s: float = 0.10
    vocab_ratio: float = 0.15
    phrase_len: int = 10
    weighting: Optional[str] = None   # None resolves per method
    lam: float = 0.5                  # grasshopper / mmr balance
    damping: float = 0.85
    threshold: float = 0.1
    mean_shift: bool = True
    trim_db: Optional[float] = None
    seed: int = 0

    _KEY_ALIASES = {"lambda": "lam"}

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.frame_len_s <= 0:
            raise ValueError("frame_len_s must be positive")
        if self.phrase_len < 1:
            raise ValueError("phrase_len must be at least 1")
        if not 0.0 < self.vocab_ratio <= 1.0:
            raise ValueError("vocab_ratio must lie in (0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must lie in (0, 1)")
        if self.weighting not in (None, "dampened-tfidf", "binary"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.method == "lsa" and self.weighting == "dampened-tfidf":
            raise ValueError("lsa requires binary weighting")
        if self.trim_db is not None and self.trim_db >= 0:
            raise ValueError("trim_db must be negative (dBFS)")

    @property
    def resolved_weighting(self) -> str:
        if self.weighting is not None:
            return self.weighting
        return "binary" if self.method == "lsa" else "dampened-tfidf"

    @classmethod
    def from_dict(cls, doc: dict) -> "SummaryConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in doc.items():
            name = cls._KEY_ALIASES.get(key, key)
            if name not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = value
        return cls(**kwargs)

    def to_params(self) -> dict:
        """Fully resolved parameter record for provenance sidecars."""
        doc = {
            "method": self.method,
            "duration_s": self.duration_s,
            "frame_len_s": self.frame_len_s,
            "trim_db": self.trim_db,
            "seed": self.seed,
            "rng": "pcg64",
        }
        if self.method in PHRASE_METHODS:
            doc.update(vocab_ratio=self.vocab_ratio, phrase_len=self.phrase_len,
                       weighting=self.resolved_weighting)
        if self.method in ("grasshopper", "mmr"):
            doc["lambda"] = self.lam
        if self.method == "lexrank":
            doc.update(damping=self.damping, threshold=self.threshold)
        if self.method == "gaussian-sampler":
            doc["mean_shift"] = self.mean_shift
        return doc

    def descriptor(self) -> str:
        """Canonical one-line identity of this setup."""
        parts = [f"{k}={v}" for k, v in sorted(self.to_params().items())]
        return " ".join(parts)

    def with_seed(self, seed: int) -> "SummaryConfig":
        return replace(self, seed=seed)


def target_frames(duration_s: float, frame_len_s: float) -> int:
    return max(1, round(duration_s / frame_len_s))


def fixed_segment(n_frames: int, duration_s: float, frame_len_s: float,
                  position: str) -> SummarySelection:
    """Contiguous window at the beginning, middle, or end of the song."""
    if position not in FIXED_METHODS:
        raise ValueError(f"position must be one of {FIXED_METHODS}")
    w = target_frames(duration_s, frame_len_s)
    if w > n_frames:
        raise ValueError("requested window exceeds the song")
    if position == "beginning":
        start = 0
    elif position == "middle":
        start = (n_frames - w) // 2
    else:
        start = n_frames - w
    return SummarySelection(np.arange(start, start + w), frame_len_s, position)


def avs_select(features: FeatureSequence, duration_s: float) -> SummarySelection:
    """Window with the highest mean cosine similarity to the whole song.

    Scans every window of the target length at one-frame hops; the score of
    a window is the mean over its frames of each frame's average cosine
    similarity to every frame of the song. Earliest window wins ties.
    """
    n = len(features)
    w = target_frames(duration_s, features.frame_len_s)
    if w > n:
        raise ValueError("requested window exceeds the song")
    x = features.vectors
    norms = np.linalg.norm(x, axis=1)
    unit = x / np.where(norms == 0.0, 1.0, norms)[:, None]
    # mean_j cos(f_i, f_j) = unit_i . mean_j(unit_j); no n x n matrix needed
    per_frame = unit @ unit.mean(axis=0)
    sums = np.concatenate([[0.0], np.cumsum(per_frame)])
    window_scores = (sums[w:] - sums[:-w]) / w
    start = int(np.argmax(window_scores))
    return SummarySelection(np.arange(start, start + w), features.frame_len_s, "avs")


def gaussian_sampler_select(features: FeatureSequence, n: int, mean_shift: bool,
                            seed: int) -> SummarySelection:
    """Iteratively draw from the song model and keep the nearest unused frame.

    Draws and frames are compared by Mahalanobis distance under the song
    model; with ``mean_shift`` on, a running difference vector corrects the
    drift between draws and the frames actually matched. Deterministic for
    a given seed.
    """
    x = features.vectors
    if not 1 <= n <= len(x):
        raise ValueError("n must lie in [1, frame count]")
    g = estimate_sgm(features)
    rng = np.random.Generator(np.random.PCG64(seed))
    draws_w = rng.standard_normal((n, g.dim))  # whitened draws from the model
    frames_w = solve_triangular(g.chol, (x - g.mean).T, lower=True).T
    picked = kernels.sampler_select(np.ascontiguousarray(frames_w),
                                    np.ascontiguousarray(draws_w), n, mean_shift)
    return SummarySelection(np.sort(picked), features.frame_len_s, "gaussian-sampler",
                            {"mean_shift": mean_shift, "seed": seed, "rng": "pcg64"})


def _take_phrases(order, spans, n_target: int, frame_len_s: float, method: str,
                  params: dict) -> SummarySelection:
    chosen: list[np.ndarray] = []
    total = 0
    for phrase in order:
        start, stop = spans[phrase]
        chosen.append(np.arange(start, stop))
        total += stop - start
        if total >= n_target:
            break
    excess = total - n_target
    if excess > 0:
        chosen[-1] = chosen[-1][:-excess]  # trim trailing frames of the last phrase
    indices = np.sort(np.concatenate(chosen))
    return SummarySelection(indices, frame_len_s, method, params)


def _rank_phrases(method: str, doc, config: SummaryConfig) -> rankers.RankResult:
    if method == "grasshopper":
        sim = np.maximum(pairwise_cosine(doc.vectors), 0.0)
        # guarantee positive row mass even for zero-vector phrases
        np.fill_diagonal(sim, 1.0)
        return rankers.grasshopper_rank(sim, lam=config.lam)
    if method == "lexrank":
        sim = np.clip(pairwise_cosine(doc.vectors), 0.0, 1.0)
        return rankers.lexrank_rank(sim, threshold=config.threshold,
                                    damping=config.damping)
    if method == "lsa":
        return rankers.lsa_rank(doc.vectors.T)
    if method == "mmr":
        return rankers.mmr_rank(doc.vectors, lam=config.lam)
    return rankers.support_sets_rank(doc.vectors)


def summarize(clip: AudioClip, config: SummaryConfig) -> SummarySelection:
    """Run the configured method and return its frame selection.

    Phrase-ranking methods take whole phrases in rank order until the
    target length is reached, then trim the trailing frames of the last
    phrase so every method yields the same selected duration.
    """
    config.validate()
    stage = "framing"
    try:
        n_frames = len(frame_signal(clip, config.frame_len_s))
        n_target = target_frames(config.duration_s, config.frame_len_s)
        if n_target >= n_frames:
            # whole song requested: method-independent identity selection
            return SummarySelection(np.arange(n_frames), config.frame_len_s,
                                    config.method, config.to_params())
        if config.method in FIXED_METHODS:
            stage = "fixed segment"
            sel = fixed_segment(n_frames, config.duration_s, config.frame_len_s,
                                config.method)
            sel.params = config.to_params()
            return sel
        stage = "feature extraction"
        feats = mfcc(clip, config.frame_len_s)
        if config.method == "avs":
            stage = "average-similarity scan"
            sel = avs_select(feats, config.duration_s)
            sel.params = config.to_params()
            return sel
        if config.method == "gaussian-sampler":
            stage = "gaussian sampling"
            sel = gaussian_sampler_select(feats, n_target, config.mean_shift, config.seed)
            sel.params = config.to_params()
            return sel
        stage = "vocabulary"
        vocab = build_vocabulary(feats, config.vocab_ratio, config.seed)
        stage = "term assignment"
        terms = assign_terms(feats, vocab)
        stage = "phrase building"
        doc = build_phrases(terms, config.phrase_len, vocab.k, config.resolved_weighting)
        stage = f"{config.method} ranking"
        result = _rank_phrases(config.method, doc, config)
        stage = "phrase selection"
        return _take_phrases(result.order, doc.spans, n_target, config.frame_len_s,
                             config.method, config.to_params())
    except SummarizeError:
        raise
    except Exception as exc:
        raise SummarizeError(f"{config.method} failed during {stage}: {exc}") from exc
