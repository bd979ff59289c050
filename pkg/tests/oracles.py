"""Independent oracle implementations for derived expected values.

These deliberately avoid the engine's code paths: plain loops, brute-force
scans, finite differences.  Keep them slow and obvious.
"""

from __future__ import annotations

import numpy as np


# -- key clips --------------------------------------------------------------

def diff_signal_loops(frames: np.ndarray) -> np.ndarray:
    t, h, w = frames.shape
    out = np.zeros(t - 1)
    for i in range(t - 1):
        total = 0.0
        for r in range(h):
            for c in range(w):
                total += abs(float(frames[i + 1, r, c]) - float(frames[i, r, c]))
        out[i] = total / (h * w)
    return out


def smooth_loops(signal: np.ndarray, window: int) -> np.ndarray:
    half = window // 2
    out = np.zeros(len(signal))
    for t in range(len(signal)):
        lo, hi = max(0, t - half), min(len(signal), t + half + 1)
        out[t] = sum(signal[lo:hi]) / (hi - lo)
    return out


def peak_scan(signal: np.ndarray, window: int, k: float, max_peaks: int) -> list[int]:
    sm = smooth_loops(np.asarray(signal, dtype=float), window)
    thresh = sm.mean() + k * sm.std()
    peaks = []
    for t in range(1, len(sm) - 1):
        if sm[t] > sm[t - 1] and sm[t] > sm[t + 1] and sm[t] > thresh:
            peaks.append(t)
    peaks = sorted(peaks, key=lambda t: (-sm[t], t))[:max_peaks]
    return sorted(peaks)


# -- pose filtering ---------------------------------------------------------

def pose_filter_predicate(seq, conf_min: float, jump_max: float) -> bool:
    conf_ok = seq.conf.mean() >= conf_min
    pts = seq.coords.reshape(-1, 2)
    dx = pts[:, 0].max() - pts[:, 0].min()
    dy = pts[:, 1].max() - pts[:, 1].min()
    diag = (dx * dx + dy * dy) ** 0.5
    worst = 0.0
    for t in range(seq.coords.shape[0] - 1):
        for j in range(seq.coords.shape[1]):
            step = np.linalg.norm(seq.coords[t + 1, j] - seq.coords[t, j])
            worst = max(worst, float(step))
    return bool(conf_ok and worst <= jump_max * diag)


# -- clustering -------------------------------------------------------------

def distance(a: np.ndarray, b: np.ndarray, metric: str) -> float:
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 1.0
    return float(1.0 - np.dot(a, b) / (na * nb))


def first_neighbor_components(x: np.ndarray, metric: str) -> np.ndarray:
    """Brute-force 1-NN graph + BFS connected components, first-occurrence ids."""
    n = x.shape[0]
    nn = []
    for i in range(n):
        best, best_d = None, np.inf
        for j in range(n):
            if i == j:
                continue
            d = distance(x[i], x[j], metric)
            if d < best_d:
                best, best_d = j, d
        nn.append(best)
    adj = [set() for _ in range(n)]
    for i, j in enumerate(nn):
        adj[i].add(j)
        adj[j].add(i)
    labels = -np.ones(n, dtype=int)
    next_id = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = next_id
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if labels[v] < 0:
                    labels[v] = next_id
                    stack.append(v)
        next_id += 1
    return labels


def medoid_by_pairwise_sums(members: np.ndarray, metric: str) -> int:
    n = members.shape[0]
    best, best_sum = 0, np.inf
    for i in range(n):
        s = sum(distance(members[i], members[j], metric) for j in range(n) if j != i)
        if s < best_sum:
            best, best_sum = i, s
    return best


# -- labels -----------------------------------------------------------------

def recount_assignments(a: np.ndarray, labels_flat: dict) -> bool:
    """Check the tensor against an independent membership recount.

    labels_flat maps (video_row, clip_index) -> cluster id.
    """
    n, s, m = a.shape
    for i in range(n):
        for t in range(s):
            expected = labels_flat.get((i, t))
            row = a[i, t]
            if expected is None:
                if row.sum() != 0:
                    return False
            else:
                if row.sum() != 1 or row[expected] != 1:
                    return False
    return True


def or_over_clips(a: np.ndarray) -> np.ndarray:
    n, s, m = a.shape
    out = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for k in range(m):
            present = False
            for t in range(s):
                if a[i, t, k]:
                    present = True
            out[i, k] = 1 if present else 0
    return out


# -- context ----------------------------------------------------------------

def filter_rules_stepwise(candidates, class_names, embed, max_words, dup_sim, class_sim):
    """Apply the three filtering rules one at a time, brute force."""

    def unit(v):
        n = np.linalg.norm(v)
        return v / n if n > 0 else v

    def canon(s):
        return " ".join(s.lower().split())

    ordered, seen = [], set()
    for cls in candidates:
        for raw in candidates[cls]:
            p = canon(raw)
            if p and p not in seen:
                seen.add(p)
                ordered.append(p)
    stage1 = [p for p in ordered if len(p.split()) <= max_words]
    class_vecs = [unit(np.asarray(embed(canon(c)), dtype=float)) for c in class_names]
    stage2 = [
        p
        for p in stage1
        if all(float(unit(np.asarray(embed(p), dtype=float)) @ cv) <= class_sim for cv in class_vecs)
    ]
    survivors = []
    for p in stage2:
        v = unit(np.asarray(embed(p), dtype=float))
        if all(float(v @ unit(np.asarray(embed(q), dtype=float))) <= dup_sim for q in survivors):
            survivors.append(p)
    return survivors


def matmul_triple_loop(a: np.ndarray, b_t: np.ndarray) -> np.ndarray:
    n, d = a.shape
    m = b_t.shape[0]
    out = np.zeros((n, m))
    for i in range(n):
        for k in range(m):
            acc = 0.0
            for j in range(d):
                acc += a[i, j] * b_t[k, j]
            out[i, k] = acc
    return out


# -- gradients and optimization ----------------------------------------------

def finite_difference_grad(f, w: np.ndarray, h: float = 1e-4) -> np.ndarray:
    g = np.zeros_like(w, dtype=float)
    it = np.nditer(w, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = w[idx]
        w[idx] = orig + h
        up = f(w)
        w[idx] = orig - h
        down = f(w)
        w[idx] = orig
        g[idx] = (up - down) / (2 * h)
        it.iternext()
    return g


def subgradient_solve(z_std, y, lam, alpha, num_classes, iters=100000, check_every=25):
    """Long-horizon subgradient descent on the elastic-net softmax objective.

    Tries several step scales and returns the best objective seen anywhere.
    """
    n, m = z_std.shape
    k = num_classes
    y_onehot = np.zeros((n, k))
    y_onehot[np.arange(n), y] = 1.0

    def objective(w, b):
        logits = z_std @ w.T + b
        logp = logits - logits.max(axis=1, keepdims=True)
        logp = logp - np.log(np.exp(logp).sum(axis=1, keepdims=True))
        ce = -np.sum(y_onehot * logp) / (n * k)
        return ce + lam * ((1 - alpha) * 0.5 * np.sum(w**2) + alpha * np.sum(np.abs(w)))

    best = np.inf
    for scale in (0.05, 0.25, 1.0, 4.0):
        w = np.zeros((k, m))
        b = np.zeros(k)
        for t in range(1, iters + 1):
            logits = z_std @ w.T + b
            shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
            p = shifted / shifted.sum(axis=1, keepdims=True)
            g = (p - y_onehot) / (n * k)
            gw = g.T @ z_std + (1 - alpha) * lam * w + alpha * lam * np.sign(w)
            gb = g.sum(axis=0)
            step = scale / np.sqrt(t)
            w -= step * gw
            b -= step * gb
            if t % check_every == 0 or t == iters:
                best = min(best, objective(w, b))
    return best


def forward_pass_loops(model, x: np.ndarray):
    """Naive per-element forward pass for predict comparisons."""
    w_all = np.concatenate([model.w_motion, model.w_object, model.w_scene], axis=0)
    m, d = w_all.shape
    z = np.zeros(m)
    for k in range(m):
        for j in range(d):
            z[k] += w_all[k, j] * x[j]
    z_std = np.zeros(m)
    for k in range(m):
        z_std[k] = (z[k] - model.act_mean[k]) / model.act_std[k]
    kk = model.num_classes
    logits = np.zeros(kk)
    for c in range(kk):
        logits[c] = model.bias[c]
        for k in range(m):
            logits[c] += model.w_classifier[c, k] * z_std[k]
    e = np.exp(logits - logits.max())
    return e / e.sum(), z, z_std, logits


def top_n_by_abs_weight(row: np.ndarray, top_n: int) -> list[int]:
    pairs = sorted(enumerate(row), key=lambda kv: (-abs(kv[1]), kv[0]))
    return [i for i, _ in pairs[:top_n]]
