"""audigest: machine-oriented audio summaries and information-loss scoring.

Summarize a song with any of ten selection methods, render the result back
to audio, and judge it by the divergence between Gaussian models of the
original and summarized feature streams.
"""

__version__ = "0.1.0"

from .audio import AudioClip, load_audio, synthesize_summary, trim_silence, write_audio
from .features import FeatureSequence, log_mel, mfcc, raw_sample_stream
from .gaussian import Sgm, estimate_sgm, kl_divergence, mahalanobis, mc_kl_estimate, sample
from .summarize import METHODS, SummaryConfig, SummarySelection, summarize

__all__ = [
    "AudioClip",
    "FeatureSequence",
    "METHODS",
    "Sgm",
    "SummaryConfig",
    "SummarySelection",
    "estimate_sgm",
    "kl_divergence",
    "load_audio",
    "log_mel",
    "mahalanobis",
    "mc_kl_estimate",
    "mfcc",
    "raw_sample_stream",
    "sample",
    "summarize",
    "synthesize_summary",
    "trim_silence",
    "write_audio",
    "__version__",
]
