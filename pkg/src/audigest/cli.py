"""Command-line interface.

Subcommands: ``summarize`` (WAV or manifest to summary WAVs + selection
sidecars), ``evaluate`` (manifest + setup grid to divergence reports),
``features`` (persist one feature view), ``kl`` (divergence between two
WAVs under both views).

Exit codes: 0 success, 1 total failure, 2 usage or config error,
3 partial failure (some songs failed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .audio import load_audio, synthesize_summary, trim_silence, write_audio
from .errors import AudigestError
from .evaluation import (VIEWS, best_on_average, evaluate_grid, load_manifest,
                         song_seed, view_features)
from .features import frame_length_samples, load_features, mfcc, save_features
from .gaussian import estimate_sgm, kl_divergence
from .summarize import SummaryConfig, summarize

EXIT_OK = 0
EXIT_TOTAL = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_wav(clip, path: Path) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".wav")
    os.close(fd)
    try:
        write_audio(clip, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_from_args(args) -> SummaryConfig:
    return SummaryConfig(
        method=args.method,
        duration_s=args.duration,
        frame_len_s=args.frame,
        vocab_ratio=args.vocab_ratio,
        phrase_len=args.phrase_len,
        weighting=args.weighting,
        lam=args.lambda_,
        damping=args.damping,
        threshold=args.threshold,
        mean_shift=args.mean_shift,
        trim_db=args.trim_db,
        seed=args.seed,
    )


def _gather_inputs(input_path: Path) -> list[tuple[str, Path]]:
    if input_path.suffix.lower() == ".wav":
        return [(input_path.stem, input_path)]
    return load_manifest(input_path)


def _summarize_song(task):
    song_id, wav_path, config, out_dir = task
    try:
        clip = load_audio(wav_path)
        if config.trim_db is not None:
            clip, _ = trim_silence(clip, config.trim_db)
        seeded = config.with_seed(song_seed(config.seed, song_id))
        selection = summarize(clip, seeded)
        flen = frame_length_samples(config.frame_len_s, clip.sample_rate)
        summary = synthesize_summary(clip, selection, flen)
        _atomic_write_wav(summary, out_dir / f"{song_id}.summary.wav")
        sidecar = {
            "id": song_id,
            "source": str(wav_path),
            "method": selection.method,
            "params": selection.params,
            "base_seed": config.seed,
            "song_seed": seeded.seed,
            "frame_len_s": selection.frame_len_s,
            "frame_indices": [int(i) for i in selection.frame_indices],
            "version": __version__,
        }
        _atomic_write_text(out_dir / f"{song_id}.selection.json",
                           json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
        return song_id, None
    except Exception as exc:
        return song_id, str(exc)


def cmd_summarize(args) -> int:
    config = _config_from_args(args)
    entries = _gather_inputs(Path(args.input))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out_dir / "run_config.json",
                       json.dumps(config.to_params(), indent=2, sort_keys=True) + "\n")
    tasks = [(sid, path, config, out_dir) for sid, path in entries]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_summarize_song, tasks))
    else:
        results = [_summarize_song(t) for t in tasks]
    failures = [(sid, err) for sid, err in results if err is not None]
    for sid, err in failures:
        print(f"error: {sid}: {err}", file=sys.stderr)
    if len(failures) == len(entries):
        return EXIT_TOTAL
    return EXIT_PARTIAL if failures else EXIT_OK


def _load_grid(path: Path, base_seed: int) -> list[SummaryConfig]:
    """One JSON object per line; every entry validated before any work."""
    setups = []
    problems = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            doc = json.loads(line)
            doc.setdefault("seed", base_seed)
            setups.append(SummaryConfig.from_dict(doc))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            problems.append(f"{path}:{lineno}: {exc}")
    if problems:
        raise ValueError("invalid grid entries:\n" + "\n".join(problems))
    if not setups:
        raise ValueError(f"{path}: no setups")
    return setups


def _report_csv(report) -> str:
    lines = ["setup,view,n_songs,n_failures,mean_kl"]
    for row in report.rows:
        lines.append(f"\"{row.descriptor}\",{row.view},{len(row.per_song)},"
                     f"{len(row.failures)},{row.mean_kl!r}")
    return "\n".join(lines) + "\n"


def cmd_evaluate(args) -> int:
    views = tuple(args.views.split(","))
    for view in views:
        if view not in VIEWS:
            raise ValueError(f"unknown view {view!r}")
    setups = _load_grid(Path(args.grid), args.seed)
    entries = load_manifest(Path(args.manifest))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = evaluate_grid(entries, setups, views=views, jobs=args.jobs,
                           metadata={"dataset": Path(args.manifest).stem,
                                     "seed": args.seed})
    doc = report.to_doc()
    doc["best_on_average"] = {
        view: {method: {"params": params, "mean_kl_over_durations": avg}
               for method, (params, avg) in best_on_average(report, view).items()}
        for view in views
    }
    _atomic_write_text(out_dir / "report.json",
                       json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _atomic_write_text(out_dir / "report.csv", _report_csv(report))
    grid_record = [s.to_params() for s in setups]
    _atomic_write_text(out_dir / "run_config.json",
                       json.dumps({"seed": args.seed, "views": list(views),
                                   "setups": grid_record, "version": __version__},
                                  indent=2, sort_keys=True) + "\n")
    n_failed = sum(len(r.failures) for r in report.rows)
    for row in report.rows:
        print(f"{row.view:8s} mean_kl={row.mean_kl:.6g}  {row.descriptor}")
    return EXIT_PARTIAL if n_failed else EXIT_OK


def cmd_features(args) -> int:
    clip = load_audio(Path(args.input))
    if args.view == "mfcc":
        seq = mfcc(clip, args.frame)
    else:
        seq = view_features(clip, args.view)
    save_features(seq, args.out)
    loaded = load_features(args.out)
    assert np.array_equal(loaded.vectors, seq.vectors)
    print(f"{args.view}: {len(seq)} x {seq.dim} -> {args.out}")
    return EXIT_OK


def cmd_kl(args) -> int:
    original = load_audio(Path(args.original))
    summary = load_audio(Path(args.summary))
    views = VIEWS if args.view == "both" else (args.view,)
    for view in views:
        p = estimate_sgm(view_features(original, view))
        q = estimate_sgm(view_features(summary, view))
        print(f"{view}: {kl_divergence(p, q)!r} nats")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="audigest",
                                     description="machine-oriented audio summarization")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("summarize", help="summarize a WAV file or manifest")
    ps.add_argument("input", help="WAV file or manifest (id, path lines)")
    ps.add_argument("--method", required=True)
    ps.add_argument("--duration", type=float, required=True, help="summary length in seconds")
    ps.add_argument("--frame", type=float, default=0.10, help="frame size in seconds")
    ps.add_argument("--vocab-ratio", type=float, default=0.15)
    ps.add_argument("--phrase-len", type=int, default=10)
    ps.add_argument("--weighting", choices=("dampened-tfidf", "binary"), default=None)
    ps.add_argument("--lambda", dest="lambda_", type=float, default=0.5)
    ps.add_argument("--damping", type=float, default=0.85)
    ps.add_argument("--threshold", type=float, default=0.1)
    ps.add_argument("--mean-shift", action=argparse.BooleanOptionalAction, default=True)
    ps.add_argument("--trim-db", type=float, default=None)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_summarize)

    pe = sub.add_parser("evaluate", help="run a setup grid over a manifest")
    pe.add_argument("manifest")
    pe.add_argument("--grid", required=True, help="JSON-lines file, one setup per line")
    pe.add_argument("--views", default="raw,log-mel")
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--jobs", type=int, default=1)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_evaluate)

    pf = sub.add_parser("features", help="extract and persist one feature view")
    pf.add_argument("input")
    pf.add_argument("--view", choices=("mfcc", "log-mel", "raw"), required=True)
    pf.add_argument("--frame", type=float, default=0.05)
    pf.add_argument("--out", required=True)
    pf.set_defaults(func=cmd_features)

    pk = sub.add_parser("kl", help="divergence between two WAV files")
    pk.add_argument("original")
    pk.add_argument("summary")
    pk.add_argument("--view", choices=("raw", "log-mel", "both"), default="both")
    pk.set_defaults(func=cmd_kl)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, AudigestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_TOTAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOTAL


if __name__ == "__main__":
    sys.exit(main())
