"""Slow dictionary-based flooding decoder used as an oracle for the compiled engine.

Written from the update-rule definitions only; shares no code with the
package besides plain data (edge lists).
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np


def _q(x, levels):
    for lv in reversed(levels):
        if abs(x) >= lv:  # thresholds equal levels for both multilevel decoders
            return lv if x > 0 else -lv
    return 0


def _var_msg(kind, others, y, levels):
    if kind == "7lt":
        return _q(sum(others) + y, levels)
    if kind == "5nlt":
        m1, m2 = others
        opposite = (m1 >= 0) != (m2 >= 0)
        w = 0 if opposite and abs(m1) + abs(m2) == 2 * levels[1] else 1
        return _q(m1 + m2 + w * y, levels)
    if kind == "gallager-b":
        bad = sum(1 for m in others if m * y < 0)
        return -y if bad > len(others) // 2 else y
    x = sum(others) + y
    if kind == "bp":
        x = max(-30.0, min(30.0, x))
    return x


def _chk_msg(kind, others):
    if not others:
        return 0
    neg = sum(1 for m in others if m < 0) % 2
    if kind == "bp":
        p = 1.0
        for m in others:
            p *= math.tanh(m / 2)
        p = max(-1.0, min(1.0, p))
        if abs(p) == 1.0:
            mag = 30.0
        else:
            mag = min(30.0, abs(2 * math.atanh(p)))
        return -mag if neg else mag
    mag = min(abs(m) for m in others)
    return -mag if neg else mag


LEVELS = {"7lt": (2, 7, 17), "5nlt": (1, 3)}
CMAG = {"7lt": 3, "5nlt": 1, "minsum": 1.0, "gallager-b": 1}


def reference_decode(kind, n, chk_adj, received, max_iter=100, alpha=None, inject=None, stop="syndrome"):
    """Return (ok, iterations, decisions, history) where history[l] = (v2c, c2v) dicts keyed (v, c).

    ``inject`` = (set of (v, c) edges, list of values per iteration) overrides
    check outputs; ``stop`` is "syndrome" or "all-zero".
    """
    levels = LEVELS.get(kind)
    mag = math.log((1 - alpha) / alpha) if kind == "bp" else CMAG[kind]
    y = [-mag if b else mag for b in received]
    nbrs = [[] for _ in range(n)]
    for c, vs in enumerate(chk_adj):
        for v in vs:
            nbrs[v].append(c)
    c2v = {(v, c): 0 for c, vs in enumerate(chk_adj) for v in vs}
    history = []
    dec = list(received)
    ok = False
    it = 0
    for it in range(1, max_iter + 1):
        v2c = {}
        for v in range(n):
            for c in nbrs[v]:
                others = [c2v[(v, d)] for d in nbrs[v] if d != c]
                v2c[(v, c)] = _var_msg(kind, others, y[v], levels)
        c2v = {}
        for c, vs in enumerate(chk_adj):
            for v in vs:
                c2v[(v, c)] = _chk_msg(kind, [v2c[(u, c)] for u in vs if u != v])
        if inject:
            edges, vals = inject
            for e in edges:
                c2v[e] = vals[it - 1]
        tol = 1e-9 if kind == "bp" else 0
        dec = []
        for v in range(n):
            s = y[v] + sum(c2v[(v, c)] for c in nbrs[v])
            dec.append(0 if s > tol else 1 if s < -tol else int(received[v]))
        history.append((v2c, c2v))
        if stop == "all-zero":
            ok = not any(dec)
        else:
            ok = all(sum(dec[v] for v in vs) % 2 == 0 for vs in chk_adj)
        if ok:
            break
    return ok, it, dec, history


# a cycle-free code on 12 bits
TREE_CHECKS = [[0, 1, 2], [2, 3, 4], [4, 5], [1, 6, 7], [7, 8], [3, 9, 10], [10, 11]]


def bitwise_map(checks, n, r, alpha):
    """Exhaustive bitwise MAP decisions; ties go to the received bit."""
    H = np.zeros((len(checks), n), dtype=np.uint8)
    for j, vs in enumerate(checks):
        H[j, vs] = 1
    words = np.array(list(product((0, 1), repeat=n)), dtype=np.uint8)
    cw = words[~((words @ H.T) % 2).any(axis=1)]
    d = (cw != r).sum(axis=1)
    logp = d * math.log(alpha) + (n - d) * math.log(1 - alpha)
    w = np.exp(logp - logp.max())
    p1 = (w[:, None] * cw).sum(axis=0)
    p0 = w.sum() - p1
    llr = np.log(p0) - np.log(p1)
    return np.where(np.abs(llr) < 1e-9, r, (llr < 0).astype(np.uint8))
