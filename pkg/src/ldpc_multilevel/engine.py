"""Flooding-schedule decode engine.

Every decoder shares one loop. Iteration ``l`` is

1. variable half: each variable emits one message per edge from the other
   incoming check messages and its channel value (all incoming messages are
   zero in iteration 1);
2. check half: min-sum rule (tanh rule for BP), after which selected edges
   may have their check output overridden by injected values;
3. hard decisions from all incoming messages plus the channel value, then the
   stop test.

Quantized decoders (7-level LT, 5-level NLT, Gallager-B) run on int64
messages, min-sum and BP on float64. Kernels are compiled with numba and
release the GIL so independent frames can be decoded on worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numba
import numpy as np

from .code import CodeSpec, TannerGraph
from .rules import BP_CLAMP, DecoderConfig, DecoderKind, UnsupportedDegreeError

_K_LT, _K_NLT, _K_GB, _K_MS, _K_BP = 0, 1, 2, 3, 4
_KIND_CODE = {
    DecoderKind.LT7: _K_LT,
    DecoderKind.NLT5: _K_NLT,
    DecoderKind.GALLAGER_B: _K_GB,
    DecoderKind.MINSUM: _K_MS,
    DecoderKind.BP: _K_BP,
}

STOP_SYNDROME = 0
STOP_ALL_ZERO = 1


@dataclass(frozen=True)
class GraphArrays:
    """CSR view of a Tanner graph. Edges are numbered variable-major."""

    var_ptr: np.ndarray
    edge_var: np.ndarray
    edge_chk: np.ndarray
    chk_ptr: np.ndarray
    chk_edges: np.ndarray

    @classmethod
    def from_graph(cls, g: TannerGraph) -> "GraphArrays":
        edges = g.edges()
        var_ptr = np.zeros(g.n + 1, dtype=np.int64)
        np.cumsum(g.var_degrees, out=var_ptr[1:])
        edge_var = np.array([v for v, _ in edges], dtype=np.int64)
        edge_chk = np.array([c for _, c in edges], dtype=np.int64)
        index = {vc: e for e, vc in enumerate(edges)}
        chk_ptr = np.zeros(g.m + 1, dtype=np.int64)
        np.cumsum(g.chk_degrees, out=chk_ptr[1:])
        chk_edges = np.array([index[v, c] for c, vs in enumerate(g.chk_adj) for v in vs], dtype=np.int64)
        return cls(var_ptr, edge_var, edge_chk, chk_ptr, chk_edges)


def graph_arrays(g: Union[TannerGraph, CodeSpec]) -> GraphArrays:
    if isinstance(g, CodeSpec):
        g = g.graph
    arrays = g.__dict__.get("_arrays")
    if arrays is None:
        arrays = GraphArrays.from_graph(g)
        object.__setattr__(g, "_arrays", arrays)
    return arrays


# ---------------------------------------------------------------- kernels


@numba.njit(cache=True, nogil=True)
def _quantize(x, levels, thresholds):
    mag = -x if x < 0 else x
    for i in range(levels.size - 1, -1, -1):
        if mag >= thresholds[i]:
            return levels[i] if x > 0 else -levels[i]
    return 0


@numba.njit(cache=True, nogil=True)
def _var_quantized(kind, var_ptr, c2v, v2c, y, levels, thresholds):
    n = var_ptr.size - 1
    l2x2 = 2 * levels[1] if levels.size > 1 else -1
    for v in range(n):
        a = var_ptr[v]
        b = var_ptr[v + 1]
        tot = 0
        for e in range(a, b):
            tot += c2v[e]
        yv = y[v]
        if kind == _K_LT:
            for e in range(a, b):
                v2c[e] = _quantize(tot - c2v[e] + yv, levels, thresholds)
        elif kind == _K_NLT:
            for e in range(a, b):
                # the two other incoming messages (d_v = 3 checked by the caller)
                m1 = 0
                m2 = 0
                k = 0
                for f in range(a, b):
                    if f != e:
                        if k == 0:
                            m1 = c2v[f]
                        else:
                            m2 = c2v[f]
                        k += 1
                w = 1
                if (m1 < 0) != (m2 < 0) and abs(m1) + abs(m2) == l2x2:
                    w = 0
                v2c[e] = _quantize(m1 + m2 + w * yv, levels, thresholds)
        else:
            # Gallager-B: flip the channel value when a strict majority of the
            # other incoming messages disagree with it
            need = (b - a - 1) // 2 + 1
            for e in range(a, b):
                disagree = 0
                for f in range(a, b):
                    if f != e and c2v[f] * yv < 0:
                        disagree += 1
                v2c[e] = -yv if disagree >= need else yv


@numba.njit(cache=True, nogil=True)
def _var_real(kind, var_ptr, c2v, v2c, y, clamp):
    n = var_ptr.size - 1
    for v in range(n):
        a = var_ptr[v]
        b = var_ptr[v + 1]
        tot = 0.0
        for e in range(a, b):
            tot += c2v[e]
        for e in range(a, b):
            x = tot - c2v[e] + y[v]
            if kind == _K_BP:
                if x > clamp:
                    x = clamp
                elif x < -clamp:
                    x = -clamp
            v2c[e] = x


@numba.njit(cache=True, nogil=True)
def _chk_minsum(chk_ptr, chk_edges, v2c, c2v):
    m = chk_ptr.size - 1
    for c in range(m):
        a = chk_ptr[c]
        b = chk_ptr[c + 1]
        if b - a == 1:
            c2v[chk_edges[a]] = 0
            continue
        neg = False
        arg = a
        min1 = abs(v2c[chk_edges[a]])
        for i in range(a, b):
            x = v2c[chk_edges[i]]
            if x < 0:
                neg = not neg
            if abs(x) < min1:
                min1 = abs(x)
                arg = i
        min2 = abs(v2c[chk_edges[a + 1 if arg == a else a]])
        for i in range(a, b):
            if i != arg and abs(v2c[chk_edges[i]]) < min2:
                min2 = abs(v2c[chk_edges[i]])
        for i in range(a, b):
            e = chk_edges[i]
            s = neg != (v2c[e] < 0)
            mag = min2 if i == arg else min1
            c2v[e] = -mag if s else mag


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _phi(x):
    # phi(x) = -log(tanh(x / 2)), written to stay accurate for large x
    return math.log1p(2.0 / math.expm1(x))


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _chk_bp(chk_ptr, chk_edges, v2c, c2v, phis, clamp):
    m = chk_ptr.size - 1
    for c in range(m):
        a = chk_ptr[c]
        b = chk_ptr[c + 1]
        if b - a == 1:
            c2v[chk_edges[a]] = 0.0
            continue
        neg = False
        for i in range(a, b):
            x = v2c[chk_edges[i]]
            if x < 0:
                neg = not neg
            phis[i - a] = _phi(abs(x))
        for i in range(a, b):
            e = chk_edges[i]
            s = 0.0
            for j in range(a, b):
                if j != i:
                    s += phis[j - a]
            mag = _phi(s) if s > 0 else clamp
            if mag > clamp:
                mag = clamp
            c2v[e] = -mag if neg != (v2c[e] < 0) else mag


@numba.njit(cache=True, nogil=True)
def _decide(var_ptr, c2v, y, tie_tol, dec):
    n = var_ptr.size - 1
    nonzero = 0
    for v in range(n):
        s = y[v]
        for e in range(var_ptr[v], var_ptr[v + 1]):
            s += c2v[e]
        if s > tie_tol:
            bit = 0
        elif s < -tie_tol:
            bit = 1
        else:
            bit = 0 if y[v] > 0 else 1
        dec[v] = bit
        nonzero += bit
    return nonzero


@numba.njit(cache=True, nogil=True)
def _syndrome_zero(chk_ptr, chk_edges, edge_var, dec):
    m = chk_ptr.size - 1
    for c in range(m):
        parity = 0
        for i in range(chk_ptr[c], chk_ptr[c + 1]):
            parity ^= dec[edge_var[chk_edges[i]]]
        if parity:
            return False
    return True


@numba.njit(cache=True, nogil=True)
def _flood(kind, var_ptr, edge_var, chk_ptr, chk_edges, y, levels, thresholds, clamp, tie_tol,
           max_iter, stop_mode, early_stop, inj_edges, inj_vals, c2v, v2c, dec, phis,
           tr_v2c, tr_c2v, tr_dec):
    """Run one frame. Returns (iterations used, stop condition met)."""
    record = tr_v2c.shape[0] > 0
    c2v[:] = 0
    ok = False
    it = 0
    for it in range(1, max_iter + 1):
        if kind == _K_MS or kind == _K_BP:
            _var_real(kind, var_ptr, c2v, v2c, y, clamp)
        else:
            _var_quantized(kind, var_ptr, c2v, v2c, y, levels, thresholds)
        if kind == _K_BP:
            _chk_bp(chk_ptr, chk_edges, v2c, c2v, phis, clamp)
        else:
            _chk_minsum(chk_ptr, chk_edges, v2c, c2v)
        for i in range(inj_edges.size):
            c2v[inj_edges[i]] = inj_vals[it - 1]
        nonzero = _decide(var_ptr, c2v, y, tie_tol, dec)
        if record:
            tr_v2c[it - 1, :] = v2c
            tr_c2v[it - 1, :] = c2v
            tr_dec[it - 1, :] = dec
        if stop_mode == STOP_ALL_ZERO:
            ok = nonzero == 0
        else:
            ok = _syndrome_zero(chk_ptr, chk_edges, edge_var, dec)
        if ok and early_stop:
            break
    return it, ok


@numba.njit(cache=True, nogil=True)
def _flood_batch(kind, var_ptr, edge_var, chk_ptr, chk_edges, errors, mag, levels, thresholds,
                 clamp, tie_tol, max_iter, c2v, v2c, phis, out_conv, out_iters, out_weight):
    n = var_ptr.size - 1
    y = np.empty(n, dtype=c2v.dtype)
    dec = np.zeros(n, dtype=np.uint8)
    no_inj = np.zeros(0, dtype=np.int64)
    no_vals = np.zeros(max_iter, dtype=c2v.dtype)
    no_tr = np.zeros((0, v2c.size), dtype=c2v.dtype)
    no_tr_dec = np.zeros((0, n), dtype=np.uint8)
    for f in range(errors.shape[0]):
        for v in range(n):
            y[v] = -mag if errors[f, v] else mag
        it, ok = _flood(kind, var_ptr, edge_var, chk_ptr, chk_edges, y, levels, thresholds, clamp,
                        tie_tol, max_iter, STOP_SYNDROME, True, no_inj, no_vals, c2v, v2c, dec,
                        phis, no_tr, no_tr, no_tr_dec)
        out_conv[f] = ok
        out_iters[f] = it
        w = 0
        for v in range(n):
            w += dec[v]
        out_weight[f] = w


# ---------------------------------------------------------------- python API


@dataclass
class MessageTrace:
    """Per-iteration message record; row ``l-1`` holds iteration ``l``.

    Column ``e`` of the message arrays is edge ``edges[e]`` = (variable, check).
    """

    edges: list
    v2c: np.ndarray
    c2v: np.ndarray
    decisions: np.ndarray

    def incoming(self, iteration: int, v: int) -> list:
        """Check-to-variable messages into ``v`` in ``iteration`` (edge order)."""
        row = self.c2v[iteration - 1]
        return [row[e].item() for e, (u, _) in enumerate(self.edges) if u == v]

    def outgoing(self, iteration: int, v: int) -> list:
        row = self.v2c[iteration - 1]
        return [row[e].item() for e, (u, _) in enumerate(self.edges) if u == v]


@dataclass
class DecodeOutcome:
    converged: bool
    iterations_used: int
    hard_decision: np.ndarray
    trace: Optional[MessageTrace] = None

    @property
    def success(self) -> bool:
        """Converged to the all-zero codeword."""
        return self.converged and not self.hard_decision.any()

    def to_dict(self) -> dict:
        d = {
            "converged": bool(self.converged),
            "success": bool(self.success),
            "iterations_used": int(self.iterations_used),
            "hard_decision": [int(b) for b in self.hard_decision],
            "error_support": [int(i) for i in np.flatnonzero(self.hard_decision)],
        }
        if self.trace is not None:
            d["trace"] = {
                "edges": [list(map(int, e)) for e in self.trace.edges],
                "v2c": self.trace.v2c.tolist(),
                "c2v": self.trace.c2v.tolist(),
            }
        return d


def channel_magnitude(config: DecoderConfig):
    kind = config.kind
    if kind.quantized:
        return config.alphabet.channel_magnitude
    if kind is DecoderKind.BP:
        a = config.bp_crossover
        return math.log((1 - a) / a)
    if kind is DecoderKind.MINSUM:
        return 1.0
    return 1


def _dtype(config: DecoderConfig):
    return np.float64 if config.kind in (DecoderKind.MINSUM, DecoderKind.BP) else np.int64


def _level_arrays(config: DecoderConfig):
    if config.kind.quantized:
        a = config.alphabet
        return np.array(a.levels, dtype=np.int64), np.array(a.thresholds, dtype=np.int64)
    return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)


def check_compatible(config: DecoderConfig, graph: TannerGraph) -> None:
    if config.kind is DecoderKind.NLT5 and set(graph.var_degrees) != {3}:
        raise UnsupportedDegreeError("the 5-level NLT decoder needs a 3-left-regular code")


def _as_graph(code) -> TannerGraph:
    return code.graph if isinstance(code, CodeSpec) else code


def run(config: DecoderConfig, code, received, *, early_stop: bool = True,
        stop_mode: int = STOP_SYNDROME, inject_edges=None, inject_values=None,
        trace: Optional[bool] = None) -> DecodeOutcome:
    """Decode one frame with full control over stopping and check-output injection.

    ``inject_values[l-1]`` replaces the check output on every edge in
    ``inject_edges`` during iteration ``l``.
    """
    g = _as_graph(code)
    check_compatible(config, g)
    r = np.asarray(received, dtype=np.uint8)
    if r.shape != (g.n,):
        raise ValueError(f"received word has length {r.size}, code length is {g.n}")
    arrs = graph_arrays(g)
    dt = _dtype(config)
    mag = channel_magnitude(config)
    y = np.where(r == 1, -mag, mag).astype(dt)
    levels, thresholds = _level_arrays(config)
    T = config.max_iterations
    E = arrs.edge_var.size
    if inject_edges is None:
        inj_e = np.zeros(0, dtype=np.int64)
        inj_v = np.zeros(T, dtype=dt)
    else:
        inj_e = np.asarray(inject_edges, dtype=np.int64)
        inj_v = np.asarray(inject_values, dtype=dt)
        if inj_v.size < T:
            raise ValueError("need one injected value per iteration")
    record = config.trace if trace is None else trace
    rows = T if record else 0
    tr_v2c = np.zeros((rows, E), dtype=dt)
    tr_c2v = np.zeros((rows, E), dtype=dt)
    tr_dec = np.zeros((rows, g.n), dtype=np.uint8)
    c2v = np.zeros(E, dtype=dt)
    v2c = np.zeros(E, dtype=dt)
    dec = np.zeros(g.n, dtype=np.uint8)
    phis = np.zeros(max(g.chk_degrees), dtype=np.float64)
    it, ok = _flood(_KIND_CODE[config.kind], arrs.var_ptr, arrs.edge_var, arrs.chk_ptr, arrs.chk_edges,
                    y, levels, thresholds, BP_CLAMP, config.tie_tolerance, T, stop_mode, early_stop,
                    inj_e, inj_v, c2v, v2c, dec, phis, tr_v2c, tr_c2v, tr_dec)
    tr = None
    if record:
        tr = MessageTrace(g.edges(), tr_v2c[:it].copy(), tr_c2v[:it].copy(), tr_dec[:it].copy())
    return DecodeOutcome(bool(ok), int(it), dec, tr)


def decode(config: DecoderConfig, code, received) -> DecodeOutcome:
    """Decode a BSC output word ``received`` (bits) on ``code``."""
    return run(config, code, received)


def decode_minsum(code, received, max_iterations: int = 100, trace: bool = False) -> DecodeOutcome:
    return run(DecoderConfig(DecoderKind.MINSUM, max_iterations=max_iterations, trace=trace), code, received)


def decode_bp(code, received, alpha: float, max_iterations: int = 100, trace: bool = False,
              early_stop: bool = True) -> DecodeOutcome:
    cfg = DecoderConfig(DecoderKind.BP, max_iterations=max_iterations, bp_crossover=alpha, trace=trace)
    return run(cfg, code, received, early_stop=early_stop)


def decode_gallager_b(code, received, max_iterations: int = 100, trace: bool = False) -> DecodeOutcome:
    return run(DecoderConfig(DecoderKind.GALLAGER_B, max_iterations=max_iterations, trace=trace), code, received)


@dataclass
class BatchResult:
    converged: np.ndarray
    iterations: np.ndarray
    decision_weight: np.ndarray

    @property
    def success(self) -> np.ndarray:
        return self.converged & (self.decision_weight == 0)

    @property
    def undetected(self) -> np.ndarray:
        """Converged to a nonzero codeword."""
        return self.converged & (self.decision_weight > 0)


def decode_batch(config: DecoderConfig, code, errors) -> BatchResult:
    """Decode many frames; ``errors`` is a (frames, n) 0/1 array of flipped bits."""
    g = _as_graph(code)
    check_compatible(config, g)
    errors = np.ascontiguousarray(errors, dtype=np.uint8)
    if errors.ndim != 2 or errors.shape[1] != g.n:
        raise ValueError("errors must have shape (frames, n)")
    arrs = graph_arrays(g)
    dt = _dtype(config)
    levels, thresholds = _level_arrays(config)
    B = errors.shape[0]
    E = arrs.edge_var.size
    conv = np.zeros(B, dtype=np.bool_)
    iters = np.zeros(B, dtype=np.int64)
    weight = np.zeros(B, dtype=np.int64)
    _flood_batch(_KIND_CODE[config.kind], arrs.var_ptr, arrs.edge_var, arrs.chk_ptr, arrs.chk_edges,
                 errors, dt(channel_magnitude(config)), levels, thresholds, BP_CLAMP,
                 config.tie_tolerance, config.max_iterations, np.zeros(E, dtype=dt),
                 np.zeros(E, dtype=dt), np.zeros(max(g.chk_degrees), dtype=np.float64),
                 conv, iters, weight)
    return BatchResult(conv, iters, weight)
