"""Full-covariance Gaussian models of feature streams.

One Gaussian per stream: maximum-likelihood moments with a small shrinkage
term toward a scaled identity so short summaries (fewer frames than
dimensions) stay factorizable. The closed-form divergence between two such
models is the toolkit's information-loss measure; a Monte Carlo estimator
of the same quantity serves as its independent check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateModelError, IllConditionedError
from .features import FeatureSequence

LOG_2PI = float(np.log(2.0 * np.pi))

# negative divergences beyond round-off indicate a logic error, not noise
KL_CLAMP = -1e-9
CONDITION_LIMIT = 1e12

_SHRINKAGE_LADDER = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class Sgm:
    """Multivariate Gaussian with cached Cholesky factor and log-determinant."""

    mean: np.ndarray
    cov: np.ndarray
    chol: np.ndarray
    log_det: float
    cond: float

    @property
    def dim(self) -> int:
        return len(self.mean)

    @classmethod
    def from_moments(cls, mean: np.ndarray, cov: np.ndarray) -> "Sgm":
        mean = np.array(mean, dtype=np.float64, copy=True).reshape(-1)
        cov = np.array(cov, dtype=np.float64, copy=True)
        if cov.shape != (len(mean), len(mean)):
            raise ValueError("covariance shape does not match mean")
        if np.abs(cov - cov.T).max() > 1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise DegenerateModelError("covariance is not positive definite") from exc
        log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
        eigs = np.linalg.eigvalsh(cov)
        cond = float(eigs[-1] / max(eigs[0], np.finfo(np.float64).tiny))
        for arr in (mean, cov, chol):
            arr.setflags(write=False)
        return cls(mean, cov, chol, log_det, cond)


def _as_matrix(features) -> np.ndarray:
    if isinstance(features, FeatureSequence):
        return features.vectors
    return np.asarray(features, dtype=np.float64)


def estimate_sgm(features) -> Sgm:
    """Fit mean and ML covariance, shrunk just enough to factorize.

    Shrinkage adds ``delta * (tr(cov)/k) * I`` with delta escalating from
    1e-6 by decades until the Cholesky factorization succeeds.
    """
    x = _as_matrix(features)
    if x.ndim != 2 or len(x) < 2:
        raise ValueError("need at least 2 feature vectors")
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / len(x)
    cov = (cov + cov.T) / 2.0
    k = cov.shape[0]
    scale = float(np.trace(cov)) / k
    for delta in _SHRINKAGE_LADDER:
        try:
            return Sgm.from_moments(mean, cov + delta * scale * np.eye(k))
        except DegenerateModelError:
            continue
    raise DegenerateModelError(
        "covariance not positive definite even at maximum shrinkage "
        "(zero-variance feature stream?)"
    )


def kl_divergence(p: Sgm, q: Sgm) -> float:
    """Relative entropy D(p || q) in nats, closed form via q's Cholesky factor.

    ``p`` models the original stream, ``q`` the summary.
    """
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    if q.cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"summary covariance condition {q.cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )
    k = p.dim
    half = solve_triangular(q.chol, p.chol, lower=True)
    trace = float(np.sum(half * half))
    z = solve_triangular(q.chol, q.mean - p.mean, lower=True)
    mahal = float(z @ z)
    value = 0.5 * (trace + mahal - k + q.log_det - p.log_det)
    if value < KL_CLAMP:
        raise DegenerateModelError(f"divergence {value} below round-off window")
    return max(value, 0.0)


def mahalanobis(x, g: Sgm) -> float:
    """Scale-invariant distance from ``x`` to the model mean."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if len(x) != g.dim:
        raise ValueError("dimension mismatch")
    z = solve_triangular(g.chol, x - g.mean, lower=True)
    return float(np.sqrt(z @ z))


def sample(g: Sgm, rng: np.random.Generator, n: int | None = None):
    """Draw from the model: mean + L z with z standard normal."""
    if n is None:
        return g.mean + g.chol @ rng.standard_normal(g.dim)
    return g.mean + rng.standard_normal((n, g.dim)) @ g.chol.T


def log_density(g: Sgm, x: np.ndarray) -> np.ndarray:
    """Log pdf of rows of ``x`` under ``g``."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    z = solve_triangular(g.chol, (x - g.mean).T, lower=True)
    return -0.5 * (g.dim * LOG_2PI + g.log_det + np.sum(z * z, axis=0))


def mc_kl_estimate(p: Sgm, q: Sgm, n_draws: int, rng: np.random.Generator,
                   chunk: int = 200_000) -> float:
    """Monte Carlo D(p || q): average of log p - log q over draws from p."""
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    total = 0.0
    remaining = n_draws
    while remaining > 0:
        m = min(chunk, remaining)
        draws = sample(p, rng, m)
        total += float(np.sum(log_density(p, draws) - log_density(q, draws)))
        remaining -= m
    return total / n_draws


def save_sgm(g: Sgm, path) -> None:
    """Portable text serialization; floats round-trip exactly via repr."""
    tril = [[g.cov[i, j] for j in range(i + 1)] for i in range(g.dim)]
    doc = {"dim": g.dim, "mean": list(g.mean), "cov_lower": tril}
    Path(path).write_text(json.dumps(doc))


def load_sgm(path) -> Sgm:
    doc = json.loads(Path(path).read_text())
    k = doc["dim"]
    cov = np.zeros((k, k))
    for i, row in enumerate(doc["cov_lower"]):
        cov[i, : i + 1] = row
        cov[: i + 1, i] = row
    return Sgm.from_moments(np.array(doc["mean"]), cov)
