"""Phrase-ranking algorithms: absorbing-chain walk, graph centrality,
latent-topic scores, relevance/diversity trade-off, and support sets.

Every ranker returns a full permutation of the input items, best first.
Ties always resolve to the lowest index. Methods that define one global
per-item score expose it; greedy methods whose step objective changes as
items are picked return ``scores=None``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .lexicon import cosine_similarity, pairwise_cosine

STATIONARY_TOL = 1e-10
STATIONARY_MAX_ITER = 100_000
CENTRALITY_TOL = 1e-8
CENTRALITY_MAX_ITER = 10_000


@dataclass
class RankResult:
    order: np.ndarray                 # permutation of item indices, best first
    scores: np.ndarray | None = None  # per-item scores where defined

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=np.int64)


def _descending(scores: np.ndarray) -> np.ndarray:
    # stable sort on negated scores: ties break by ascending index
    return np.argsort(-scores, kind="stable").astype(np.int64)


def grasshopper_rank(w: np.ndarray, r: np.ndarray | None = None,
                     lam: float = 0.5, k: int | None = None) -> RankResult:
    """Absorbing random-walk ranking.

    The first item is the mode of the stationary distribution of
    ``lam * rownorm(w) + (1 - lam) * 1 r^T``; each later item maximizes the
    expected number of visits once everything ranked so far is absorbing.
    Items beyond ``k`` (default: all) are appended in index order.
    """
    w = np.asarray(w, dtype=np.float64)
    n = len(w)
    if w.shape != (n, n) or (w < 0).any():
        raise ValueError("w must be a square non-negative matrix")
    rowsums = w.sum(axis=1)
    if (rowsums <= 0).any():
        raise ValueError("every row of w needs positive mass")
    if r is None:
        r = np.full(n, 1.0 / n)
    else:
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (n,) or (r < 0).any() or abs(r.sum() - 1.0) > 1e-9:
            raise ValueError("r must be a probability distribution over items")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise ValueError("k out of range")

    p = lam * (w / rowsums[:, None]) + (1.0 - lam) * np.outer(np.ones(n), r)

    pi = np.full(n, 1.0 / n)
    for _ in range(STATIONARY_MAX_ITER):
        nxt = p.T @ pi
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < STATIONARY_TOL:
            pi = nxt
            break
        pi = nxt
    else:
        raise ConvergenceError("stationary distribution did not converge")

    ranked = [int(np.argmax(pi))]
    unranked = [i for i in range(n) if i != ranked[0]]
    while len(ranked) < k and len(unranked) > 1:
        q = p[np.ix_(unranked, unranked)]
        try:
            visits = np.linalg.solve(np.eye(len(unranked)) - q.T, np.ones(len(unranked)))
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("absorbing chain is degenerate (I - Q singular)") from exc
        visits /= n - len(ranked)
        pick = int(np.argmax(visits))
        ranked.append(unranked.pop(pick))
    order = ranked + unranked
    return RankResult(np.array(order))


def lexrank_rank(sim: np.ndarray, threshold: float = 0.1, damping: float = 0.85,
                 weighted: bool = True) -> RankResult:
    """Graph centrality over the phrase-similarity graph.

    Edges exist where similarity exceeds the threshold (the diagonal is
    ignored). Scores are iterated to a fixpoint of the recommendation
    recurrence; isolated vertices keep the teleport score (1 - d) / N.
    """
    sim = np.asarray(sim, dtype=np.float64)
    n = len(sim)
    if sim.shape != (n, n):
        raise ValueError("sim must be square")
    if np.abs(sim - sim.T).max() > 1e-9:
        raise ValueError("sim must be symmetric")
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    adj = sim > threshold
    np.fill_diagonal(adj, False)
    if weighted:
        wt = np.where(adj, sim, 0.0)
        mass = wt.sum(axis=1)
        m = np.divide(wt, mass[None, :], out=np.zeros_like(wt), where=mass[None, :] > 0)
    else:
        deg = adj.sum(axis=1).astype(np.float64)
        m = np.divide(adj.astype(np.float64), deg[None, :],
                      out=np.zeros((n, n)), where=deg[None, :] > 0)
    base = (1.0 - damping) / n
    scores = np.full(n, 1.0 / n)
    for _ in range(CENTRALITY_MAX_ITER):
        nxt = base + damping * (m @ scores)
        if np.abs(nxt - scores).max() < CENTRALITY_TOL:
            scores = nxt
            break
        scores = nxt
    return RankResult(_descending(scores), scores)


def lsa_rank(a: np.ndarray) -> RankResult:
    """Latent-topic phrase scores from the singular value decomposition.

    Topics are kept while their singular value stays at least half the
    largest one; phrase j scores sqrt(sum_i v_ij^2 sigma_i^2) over the
    kept topics.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or (a < 0).any():
        raise ValueError("a must be a non-negative matrix")
    if not a.any():
        raise ValueError("a must contain at least one nonzero entry")
    _, sigma, vt = np.linalg.svd(a, full_matrices=False)
    n_topics = int(np.sum(sigma >= sigma[0] / 2.0))
    scores = np.sqrt(((vt[:n_topics] ** 2) * (sigma[:n_topics, None] ** 2)).sum(axis=0))
    return RankResult(_descending(scores), scores)


def mmr_rank(vectors: np.ndarray, lam: float = 0.5, k: int | None = None) -> RankResult:
    """Greedy relevance-minus-redundancy selection.

    The query is the centroid of all phrase vectors; both similarities are
    cosine. The redundancy term is 0 for the first pick (maximum over an
    empty selection).
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    n = len(vectors)
    if n == 0:
        raise ValueError("no vectors")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    if k is None:
        k = n
    query = vectors.mean(axis=0)
    relevance = np.array([cosine_similarity(v, query) for v in vectors])
    sims = pairwise_cosine(vectors)
    picked = np.zeros(n, dtype=bool)
    max_to_selected = np.zeros(n)  # max over the empty selection is defined as 0
    order = []
    for _ in range(min(k, n)):
        objective = lam * relevance - (1.0 - lam) * max_to_selected
        objective[picked] = -np.inf
        choice = int(np.argmax(objective))
        if order:
            max_to_selected = np.maximum(max_to_selected, sims[:, choice])
        else:
            max_to_selected = sims[:, choice].copy()
        order.append(choice)
        picked[choice] = True
    order += [i for i in range(n) if not picked[i]]
    return RankResult(np.array(order))


def support_sets_rank(vectors: np.ndarray) -> RankResult:
    """Frequency in support sets under the passage-order threshold heuristic.

    All phrases are split into two clusters seeded with phrases 0 and 1;
    the rest join the closer centroid (by cosine) one by one in original
    order, updating the centroid incrementally. The support set of phrase i
    is the cluster holding its most similar other phrase, minus i itself.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    n = len(vectors)
    if n < 2:
        raise ValueError("need at least two phrases")
    members = [[0], [1]]
    sums = [vectors[0].copy(), vectors[1].copy()]
    cluster_of = np.empty(n, dtype=np.int64)
    cluster_of[0], cluster_of[1] = 0, 1
    for i in range(2, n):
        c0 = cosine_similarity(vectors[i], sums[0] / len(members[0]))
        c1 = cosine_similarity(vectors[i], sums[1] / len(members[1]))
        target = 0 if c0 >= c1 else 1
        members[target].append(i)
        sums[target] += vectors[i]
        cluster_of[i] = target
    sims = pairwise_cosine(vectors)
    counts = np.zeros(n)
    for i in range(n):
        row = sims[i].copy()
        row[i] = -np.inf
        closest = int(np.argmax(row))
        for s in members[cluster_of[closest]]:
            if s != i:
                counts[s] += 1
    return RankResult(_descending(counts), counts)
