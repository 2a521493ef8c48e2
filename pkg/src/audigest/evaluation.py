"""Batch evaluation: per-song information loss under a grid of setups.

For each song and setup the pipeline is load, optional trim, summarize,
synthesize, then model both versions under a feature view and compute the
divergence from the original model to the summary model. Per-song failures
are recorded, not fatal. Song seeds derive from the song id so results do
not depend on processing order.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .audio import AudioClip, load_audio, synthesize_summary, trim_silence
from .features import FeatureSequence, frame_length_samples, log_mel, raw_sample_stream
from .gaussian import Sgm, estimate_sgm, kl_divergence
from .summarize import SummaryConfig, summarize

VIEWS = ("raw", "log-mel")


def view_features(clip: AudioClip, view: str) -> FeatureSequence:
    if view == "raw":
        return raw_sample_stream(clip)
    if view == "log-mel":
        return log_mel(clip)
    raise ValueError(f"unknown view {view!r}")


def song_seed(base_seed: int, song_id: str) -> int:
    """Stable per-song seed; independent of manifest order and platform."""
    digest = hashlib.sha256(f"{base_seed}:{song_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def load_manifest(path) -> list[tuple[str, Path]]:
    """Two-column delimited text: ``id, path``. ``#`` starts a comment.

    Relative paths resolve against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    entries = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"{path}:{lineno}: expected 'id, path'")
        song_id, wav = parts
        entries.append((song_id, (base / wav) if not Path(wav).is_absolute() else Path(wav)))
    if not entries:
        raise ValueError(f"{path}: empty manifest")
    ids = [e[0] for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate song ids")
    return entries


@dataclass
class EvalRow:
    descriptor: str
    view: str
    per_song: list        # (song_id, kl) for successes, manifest order
    failures: list        # (song_id, message)
    mean_kl: float

    @classmethod
    def build(cls, descriptor, view, per_song, failures) -> "EvalRow":
        if not per_song:
            raise ValueError(f"all songs failed for setup: {descriptor}")
        mean = float(np.mean([kl for _, kl in per_song]))
        return cls(descriptor, view, per_song, failures, mean)


@dataclass
class EvalReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "metadata": self.metadata,
            "rows": [
                {
                    "setup": r.descriptor,
                    "view": r.view,
                    "mean_kl": r.mean_kl,
                    "per_song": [{"id": sid, "kl": kl} for sid, kl in r.per_song],
                    "failures": [{"id": sid, "error": msg} for sid, msg in r.failures],
                }
                for r in self.rows
            ],
        }


def summary_divergences(clip: AudioClip, setup: SummaryConfig, views=VIEWS,
                        original_models: dict | None = None) -> dict:
    """KL from the original to the summarized clip under each view.

    ``original_models`` optionally caches the original-view Sgm per view.
    """
    if setup.trim_db is not None:
        clip, _ = trim_silence(clip, setup.trim_db)
    selection = summarize(clip, setup)
    flen = frame_length_samples(setup.frame_len_s, clip.sample_rate)
    summary = synthesize_summary(clip, selection, flen)
    out = {}
    for view in views:
        if original_models is not None and view in original_models:
            p = original_models[view]
        else:
            p = estimate_sgm(view_features(clip, view))
            if original_models is not None:
                original_models[view] = p
        q = estimate_sgm(view_features(summary, view))
        out[view] = kl_divergence(p, q)
    return out


def _song_worker(args):
    song_id, wav_path, setups, views = args
    results = {}
    try:
        clip = load_audio(wav_path)
    except Exception as exc:
        err = f"load failed: {exc}"
        for setup in setups:
            for view in views:
                results[(setup.descriptor(), view)] = ("error", err)
        return song_id, results
    # one original-model cache per distinct trim setting
    caches: dict = {}
    for setup in setups:
        seeded = setup.with_seed(song_seed(setup.seed, song_id))
        cache = caches.setdefault(setup.trim_db, {})
        try:
            kls = summary_divergences(clip, seeded, views, original_models=cache)
        except Exception as exc:
            for view in views:
                results[(setup.descriptor(), view)] = ("error", str(exc))
            continue
        for view, kl in kls.items():
            results[(setup.descriptor(), view)] = ("ok", kl)
    return song_id, results


def evaluate_grid(entries, setups, views=VIEWS, jobs: int = 1,
                  metadata: dict | None = None) -> EvalReport:
    """Evaluate every setup and view over the manifest.

    Songs may be processed in parallel; per-song seeding keeps the result
    independent of scheduling.
    """
    descriptors = [s.descriptor() for s in setups]
    if len(set(descriptors)) != len(descriptors):
        raise ValueError("setups must have unique descriptors")
    tasks = [(sid, path, setups, views) for sid, path in entries]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_song = list(pool.map(_song_worker, tasks))
    else:
        per_song = [_song_worker(t) for t in tasks]
    by_song = dict(per_song)
    rows = []
    for setup, descriptor in zip(setups, descriptors):
        for view in views:
            successes, failures = [], []
            for sid, _ in entries:
                status, value = by_song[sid][(descriptor, view)]
                if status == "ok":
                    successes.append((sid, value))
                else:
                    failures.append((sid, value))
            rows.append(EvalRow.build(descriptor, view, successes, failures))
    meta = {"n_songs": len(entries), "views": list(views), "version": __version__,
            "rng": "pcg64"}
    meta.update(metadata or {})
    return EvalReport(rows, meta)


def evaluate_setup(entries, setup: SummaryConfig, view: str) -> EvalRow:
    """Single setup, single view row over the manifest."""
    report = evaluate_grid(entries, [setup], views=(view,))
    return report.rows[0]


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two equal-length vectors of at least 2 values")
    if (x == x[0]).all() or (y == y[0]).all():
        raise ValueError("rank correlation undefined for constant input")
    rx, ry = _average_ranks(x), _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(rx @ ry / np.sqrt((rx @ rx) * (ry @ ry)))


def compare_setups(rows_a, rows_b) -> dict:
    """Spearman correlation of mean divergences, aligned by setup descriptor."""
    a = {r.descriptor: r.mean_kl for r in rows_a}
    b = {r.descriptor: r.mean_kl for r in rows_b}
    if set(a) != set(b):
        raise ValueError("reports cover different setup sets")
    keys = sorted(a)
    pairs = [(k, a[k], b[k]) for k in keys]
    rho = spearman_rho([a[k] for k in keys], [b[k] for k in keys])
    return {"rho": rho, "pairs": pairs}


def best_on_average(report: EvalReport, view: str) -> dict:
    """Per method, the parameter combination with the lowest mean divergence
    averaged over summary durations. Ties keep the earliest row."""
    groups: dict = {}
    group_order: list = []
    for row in report.rows:
        if row.view != view:
            continue
        params = dict(p.split("=", 1) for p in row.descriptor.split(" "))
        method = params.pop("method")
        params.pop("duration_s", None)
        key = (method, tuple(sorted(params.items())))
        if key not in groups:
            groups[key] = []
            group_order.append(key)
        groups[key].append(row.mean_kl)
    best: dict = {}
    for key in group_order:
        method, params = key
        avg = float(np.mean(groups[key]))
        if method not in best or avg < best[method][1]:
            best[method] = (dict(params), avg)
    return best
