"""Independent reference implementations used to check the production code.

Everything here is written from the defining formulas with naive loops and
dense linear algebra, deliberately avoiding the code paths (FFT, thin SVD,
power iteration, compiled kernels) used by the package.
"""

import math

import numpy as np

LOG_FLOOR = 1e-10


# ---------------------------------------------------------------- features

def hann_window(n):
    return np.array([0.5 - 0.5 * math.cos(2.0 * math.pi * i / (n - 1)) for i in range(n)])


def naive_dft_power(x, n_fft):
    """One-sided magnitude-squared spectrum via an explicit DFT sum."""
    padded = np.zeros(n_fft)
    padded[: len(x)] = x
    n_bins = n_fft // 2 + 1
    power = np.empty(n_bins)
    idx = np.arange(n_fft)
    for k in range(n_bins):
        angles = -2.0 * math.pi * k * idx / n_fft
        re = float(np.sum(padded * np.cos(angles)))
        im = float(np.sum(padded * np.sin(angles)))
        power[k] = re * re + im * im
    return power


def mel_of(f):
    return 2595.0 * math.log10(1.0 + f / 700.0)


def hz_of(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def triangle_filters(sample_rate, n_fft, n_bands=26):
    nyquist = sample_rate / 2.0
    mel_edges = [mel_of(nyquist) * i / (n_bands + 1) for i in range(n_bands + 2)]
    edges = [hz_of(m) for m in mel_edges]
    edges[0], edges[-1] = 0.0, nyquist
    n_bins = n_fft // 2 + 1
    weights = np.zeros((n_bands, n_bins))
    for b in range(n_bands):
        lo, mid, hi = edges[b], edges[b + 1], edges[b + 2]
        for j in range(n_bins):
            f = j * sample_rate / n_fft
            if lo <= f <= mid and mid > lo:
                weights[b, j] = (f - lo) / (mid - lo)
            elif mid < f <= hi and hi > mid:
                weights[b, j] = (hi - f) / (hi - mid)
    return weights


def dct2_ortho(x):
    n = len(x)
    out = np.empty(n)
    for k in range(n):
        acc = 0.0
        for i in range(n):
            acc += x[i] * math.cos(math.pi * (2 * i + 1) * k / (2 * n))
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        out[k] = scale * acc
    return out


def next_pow2(n):
    p = 1
    while p < n:
        p *= 2
    return p


def log_mel_frame(frame, sample_rate, n_bands=26):
    """Reference log-mel of one frame, straight from the formula chain."""
    n_fft = next_pow2(len(frame))
    power = naive_dft_power(frame * hann_window(len(frame)), n_fft)
    weights = triangle_filters(sample_rate, n_fft, n_bands)
    return np.log(weights @ power + LOG_FLOOR)


def mfcc_frame(frame, sample_rate, n_coeffs=20, n_bands=26):
    """Reference MFCCs of one frame."""
    return dct2_ortho(log_mel_frame(frame, sample_rate, n_bands))[:n_coeffs]


# ------------------------------------------------------------ ranking

def grasshopper_oracle(w, r, lam):
    """Full ranking via dense eigendecomposition and explicit inversion."""
    n = len(w)
    o = w / w.sum(axis=1, keepdims=True)
    p = lam * o + (1.0 - lam) * np.outer(np.ones(n), r)
    eigvals, eigvecs = np.linalg.eig(p.T)
    lead = np.argmin(np.abs(eigvals - 1.0))
    pi = np.real(eigvecs[:, lead])
    pi = pi / pi.sum()
    ranked = [int(np.argmax(pi))]
    unranked = [i for i in range(n) if i != ranked[0]]
    while len(unranked) > 1:
        q = p[np.ix_(unranked, unranked)]
        n_mat = np.linalg.inv(np.eye(len(unranked)) - q)
        visits = n_mat.T @ np.ones(len(unranked)) / (n - len(ranked))
        pick = int(np.argmax(visits))
        ranked.append(unranked.pop(pick))
    return np.array(ranked + unranked)


def lexrank_oracle(sim, threshold, damping, weighted, iters=100_000, tol=1e-12):
    """Element-wise fixpoint iteration written with explicit loops."""
    n = len(sim)
    adj = [[j for j in range(n) if j != i and sim[i][j] > threshold] for i in range(n)]
    scores = [1.0 / n] * n
    for _ in range(iters):
        nxt = []
        for i in range(n):
            acc = 0.0
            for j in adj[i]:
                if weighted:
                    mass = sum(sim[j][k] for k in adj[j])
                    acc += sim[i][j] / mass * scores[j]
                else:
                    acc += scores[j] / len(adj[j])
            nxt.append((1.0 - damping) / n + damping * acc)
        if max(abs(a - b) for a, b in zip(nxt, scores)) < tol:
            scores = nxt
            break
        scores = nxt
    return np.array(scores)


def lsa_oracle(a):
    """Topic count and phrase scores from the eigendecomposition of A^T A."""
    a = np.asarray(a, dtype=np.float64)
    gram = a.T @ a
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(eigvals)[::-1]
    sigma = np.sqrt(np.maximum(eigvals[order], 0.0))
    v = eigvecs[:, order]  # columns are right singular vectors
    n_topics = int(np.sum(sigma >= sigma[0] / 2.0))
    scores = np.sqrt(((v[:, :n_topics] ** 2) * (sigma[:n_topics] ** 2)).sum(axis=1))
    return n_topics, scores


def cosine(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


def mmr_oracle(vectors, lam):
    """Literal greedy MMR: re-evaluate the objective of every candidate."""
    n = len(vectors)
    query = [sum(v[j] for v in vectors) / n for j in range(len(vectors[0]))]
    selected = []
    remaining = list(range(n))
    while remaining:
        best_i, best_score = None, None
        for i in remaining:
            rel = cosine(vectors[i], query)
            red = max((cosine(vectors[i], vectors[j]) for j in selected), default=0.0)
            score = lam * rel - (1.0 - lam) * red
            if best_score is None or score > best_score:
                best_i, best_score = i, score
        selected.append(best_i)
        remaining.remove(best_i)
    return np.array(selected)


def support_sets_oracle(vectors):
    """Literal passage-order support sets with the explicit tie rules:
    cluster assignment ties go to the first cluster, most-similar ties to
    the lowest index, ranking ties to the lowest index."""
    n = len(vectors)
    clusters = [[0], [1]]
    for i in range(2, n):
        cents = []
        for members in clusters:
            cents.append([sum(vectors[m][j] for m in members) / len(members)
                          for j in range(len(vectors[0]))])
        s0, s1 = cosine(vectors[i], cents[0]), cosine(vectors[i], cents[1])
        clusters[0 if s0 >= s1 else 1].append(i)
    counts = [0] * n
    for i in range(n):
        best_j, best_sim = None, None
        for j in range(n):
            if j == i:
                continue
            s = cosine(vectors[i], vectors[j])
            if best_sim is None or s > best_sim:
                best_j, best_sim = j, s
        support = [m for c in clusters if best_j in c for m in c if m != i]
        for s in support:
            counts[s] += 1
    order = sorted(range(n), key=lambda i: (-counts[i], i))
    return np.array(order), np.array(counts, dtype=float)


# ------------------------------------------------------------ statistics

def spearman_oracle(x, y):
    """Brute-force average ranks then a textbook Pearson correlation."""
    def ranks(v):
        out = []
        for value in v:
            less = sum(1 for u in v if u < value)
            equal = sum(1 for u in v if u == value)
            out.append(less + (equal + 1) / 2.0)
        return out

    rx, ry = ranks(list(x)), ranks(list(y))
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def nearest_centroid_scan(points, centroids):
    """Brute-force nearest centroid with lowest-index ties."""
    labels = []
    for p in points:
        best_c, best_d = 0, None
        for c, centroid in enumerate(centroids):
            d = sum((a - b) ** 2 for a, b in zip(p, centroid))
            if best_d is None or d < best_d:
                best_c, best_d = c, d
        labels.append(best_c)
    return np.array(labels)
