"""Discretization of feature frames into terms and weighted phrases.

Frames are vector-quantized against a per-song k-means vocabulary, the
resulting term stream is cut into fixed-length phrases, and each phrase
becomes a term-count vector under either dampened tf-idf or binary
weighting. Document frequencies are computed within the song: its phrases
are the corpus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .features import FeatureSequence

KMEANS_MAX_ITER = 100
DEFAULT_PHRASE_LEN = 10

WEIGHTINGS = ("dampened-tfidf", "binary")


@dataclass
class Vocabulary:
    centroids: np.ndarray  # (k, dim)

    def __post_init__(self):
        self.centroids = np.ascontiguousarray(self.centroids, dtype=np.float64)

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass
class PhraseDocument:
    terms: np.ndarray            # (n_terms,) int64 in [0, k)
    phrase_len: int
    spans: list                  # (start, stop) term ranges, one per phrase
    vectors: np.ndarray          # (n_phrases, k) weighted phrase vectors
    weighting: str

    @property
    def n_phrases(self) -> int:
        return len(self.spans)


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    for i in range(1, k):
        _, d2 = kernels.nearest_centroids(x, np.ascontiguousarray(centroids[:i]))
        total = d2.sum()
        if total <= 0:
            # all remaining mass on already-chosen points; spread uniformly
            centroids[i] = x[rng.integers(n)]
            continue
        centroids[i] = x[rng.choice(n, p=d2 / total)]
    return centroids


def lloyd_iterations(x: np.ndarray, centroids: np.ndarray, max_iter: int = KMEANS_MAX_ITER):
    """Lloyd refinement until the assignment stops changing.

    Empty clusters are re-seeded from the point farthest from its centroid.
    Returns (centroids, labels, inertia history), one inertia per
    assignment step.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64, copy=True)
    k = len(centroids)
    labels = None
    inertias = []
    for _ in range(max_iter):
        new_labels, d2 = kernels.nearest_centroids(x, centroids)
        inertias.append(float(d2.sum()))
        counts = np.bincount(new_labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if len(empties):
            d2 = d2.copy()
            for c in empties:
                far = int(np.argmax(d2))
                centroids[c] = x[far]
                d2[far] = -1.0
            labels = None  # force at least one more sweep
            continue
        if labels is not None and np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, x)
        centroids = sums / counts[:, None]
    return centroids, labels, inertias


def build_vocabulary(features: FeatureSequence, ratio: float, seed: int,
                     standardize: bool = False) -> Vocabulary:
    """k-means codebook with k = max(1, round(ratio * n_frames)).

    Deterministic given the seed: k-means++ initialization followed by
    Lloyd iterations. ``standardize`` optionally z-scores each dimension
    before clustering (off by default; distances are taken on raw values).
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must lie in (0, 1]")
    x = features.vectors
    if standardize:
        sd = x.std(axis=0)
        sd[sd == 0] = 1.0
        x = (x - x.mean(axis=0)) / sd
    x = np.ascontiguousarray(x)
    n = len(x)
    k = max(1, round(ratio * n))
    n_distinct = len(np.unique(x, axis=0))
    if k > n_distinct:
        warnings.warn(f"k={k} exceeds {n_distinct} distinct frames; reducing", stacklevel=2)
        k = n_distinct
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _kmeans_pp_init(x, k, rng)
    centroids, _, _ = lloyd_iterations(x, centroids)
    return Vocabulary(centroids)


def assign_terms(features: FeatureSequence, vocab: Vocabulary) -> np.ndarray:
    """Nearest-centroid index per frame; ties go to the lowest index."""
    if features.dim != vocab.dim:
        raise ValueError("feature and vocabulary dimensions differ")
    labels, _ = kernels.nearest_centroids(features.vectors, vocab.centroids)
    return labels


def build_phrases(terms, phrase_len: int = DEFAULT_PHRASE_LEN, k: int | None = None,
                  weighting: str = "dampened-tfidf") -> PhraseDocument:
    """Cut the term stream into consecutive phrases and weight them.

    The trailing partial phrase is kept. Dampened tf-idf:
    ``(1 + ln tf) * ln(N / df)`` for tf > 0, else 0; binary: 1 iff tf > 0.
    """
    terms = np.asarray(terms, dtype=np.int64)
    if terms.ndim != 1 or len(terms) == 0:
        raise ValueError("terms must be a non-empty sequence")
    if phrase_len < 1:
        raise ValueError("phrase_len must be positive")
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {weighting!r}")
    if k is None:
        k = int(terms.max()) + 1
    spans = [(s, min(s + phrase_len, len(terms))) for s in range(0, len(terms), phrase_len)]
    n = len(spans)
    tf = np.zeros((n, k))
    for row, (start, stop) in enumerate(spans):
        np.add.at(tf[row], terms[start:stop], 1.0)
    present = tf > 0
    if weighting == "binary":
        vectors = present.astype(np.float64)
    else:
        df = present.sum(axis=0)
        idf = np.zeros(k)
        seen = df > 0
        idf[seen] = np.log(n / df[seen])
        vectors = np.where(present, (1.0 + np.log(tf, where=present, out=np.zeros_like(tf))) * idf, 0.0)
    return PhraseDocument(terms, phrase_len, spans, vectors, weighting)


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors; 0 if either has zero norm."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def pairwise_cosine(rows: np.ndarray) -> np.ndarray:
    """Cosine similarity matrix between the rows; zero rows yield 0."""
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = rows / safe[:, None]
    sim = unit @ unit.T
    return np.clip(sim, -1.0, 1.0)
