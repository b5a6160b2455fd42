"""BSC sampling, Monte Carlo frame-error-rate estimation and guarantee sweeps.

All frames transmit the all-zero codeword; a frame is described only by the
support of its channel errors. Randomness is counter based (numpy ``Philox``):
frame ``f`` of channel ``(seed, stream_id)`` is row ``f % FRAMES_PER_BLOCK`` of
block ``f // FRAMES_PER_BLOCK``, and each block has its own counter value.
Results therefore do not depend on how frames are split across workers.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional

import numpy as np

from .code import CodeSpec
from .engine import BatchResult, decode_batch
from .rules import DecoderConfig

FRAMES_PER_BLOCK = 1024
PRNG_NAME = "numpy.random.Philox(key=stream<<64|seed, counter=block<<192)"
WORKERS_ENV = "LDPC_ML_WORKERS"
DEFAULT_BUDGET = 10**8


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass(frozen=True)
class ErrorPattern:
    support: tuple[int, ...]
    n: int

    def __post_init__(self):
        s = tuple(int(i) for i in self.support)
        object.__setattr__(self, "support", s)
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("support must be strictly increasing")
        if s and (s[0] < 0 or s[-1] >= self.n):
            raise ValueError(f"support index out of range for n={self.n}")

    @classmethod
    def from_bits(cls, bits) -> "ErrorPattern":
        bits = np.asarray(bits)
        return cls(tuple(np.flatnonzero(bits)), bits.size)

    @property
    def weight(self) -> int:
        return len(self.support)

    def to_bits(self) -> np.ndarray:
        r = np.zeros(self.n, dtype=np.uint8)
        r[list(self.support)] = 1
        return r


@dataclass(frozen=True)
class BscChannel:
    alpha: float
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.alpha < 0.5:
            raise ValueError("crossover probability must lie in [0, 0.5)")
        for v in (self.seed, self.stream_id):
            if not 0 <= v < 2**64:
                raise ValueError("seed and stream_id are 64-bit unsigned values")

    def block(self, n: int, index: int) -> np.ndarray:
        """Error bits of frames ``index*FRAMES_PER_BLOCK`` onward, shape (FRAMES_PER_BLOCK, n)."""
        bitgen = np.random.Philox(key=(self.stream_id << 64) | self.seed, counter=index << 192)
        u = np.random.Generator(bitgen).random((FRAMES_PER_BLOCK, n))
        return (u < self.alpha).astype(np.uint8)


def sample_frame(channel: BscChannel, n: int, frame: int) -> ErrorPattern:
    bits = channel.block(n, frame // FRAMES_PER_BLOCK)[frame % FRAMES_PER_BLOCK]
    return ErrorPattern.from_bits(bits)


def wilson_interval(errors: int, frames: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if frames < 1 or not 0 <= errors <= frames:
        raise ValueError("need frames >= 1 and 0 <= errors <= frames")
    p = errors / frames
    z2 = z * z
    denom = 1 + z2 / frames
    centre = (p + z2 / (2 * frames)) / denom
    half = z * math.sqrt(p * (1 - p) / frames + z2 / (4 * frames * frames)) / denom
    lo, hi = centre - half, centre + half
    # pin the boundaries exactly; rounding would otherwise leave e.g. 1 - 1e-17
    if errors == 0:
        lo = 0.0
    if errors == frames:
        hi = 1.0
    return max(0.0, lo), min(1.0, hi)


@dataclass
class FEREstimate:
    decoder: str
    alpha: float
    frames_run: int
    frame_errors: int
    undetected_errors: int
    fer: float
    ci_low: float
    ci_high: float
    avg_iterations: float
    seed: int
    stream_id: int
    interval_method: str = "wilson"
    prng: str = PRNG_NAME
    max_error_weight_failed: Optional[int] = None
    min_error_weight_failed: Optional[int] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isnan(d["avg_iterations"]):
            d["avg_iterations"] = None  # no converged frame
        return d


def _map_blocks(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_fer(config: DecoderConfig, code: CodeSpec, channel: BscChannel, min_frame_errors: int = 100,
            max_frames: int = 10**6, workers: Optional[int] = None, guarantee_weight: Optional[int] = None
            ) -> FEREstimate:
    """Decode frames until ``min_frame_errors`` failures or ``max_frames`` frames.

    Frames are processed in rounds of ``workers`` blocks and the round
    containing the stopping frame is truncated at that frame, so the estimate
    is identical for any worker count. If ``guarantee_weight`` is given, every
    failing frame is asserted to carry more than that many errors.
    """
    if min_frame_errors < 1 or max_frames < 1:
        raise ValueError("stop criteria must be positive")
    workers = workers or default_workers()
    n = code.n

    def work(b):
        errors = channel.block(n, b)
        return errors, decode_batch(config, code, errors)

    frames = errs = undetected = 0
    conv_iters = conv_count = 0
    wmin = wmax = None
    block = 0
    done = False
    while not done:
        nblocks = max(1, min(workers, math.ceil((max_frames - frames) / FRAMES_PER_BLOCK)))
        for errors, res in _map_blocks(work, range(block, block + nblocks), workers):
            fail = ~res.success
            take = min(FRAMES_PER_BLOCK, max_frames - frames)
            cum = np.cumsum(fail[:take])
            hit = np.flatnonzero(cum >= min_frame_errors - errs)
            if hit.size:
                take = int(hit[0]) + 1
            sl = slice(0, take)
            f = fail[sl]
            frames += take
            errs += int(f.sum())
            undetected += int(res.undetected[sl].sum())
            conv = res.converged[sl]
            conv_iters += int(res.iterations[sl][conv].sum())
            conv_count += int(conv.sum())
            if f.any():
                w = errors[sl][f].sum(axis=1)
                wmin = int(w.min()) if wmin is None else min(wmin, int(w.min()))
                wmax = int(w.max()) if wmax is None else max(wmax, int(w.max()))
                if guarantee_weight is not None and wmin <= guarantee_weight:
                    raise AssertionError(
                        f"frame failure at error weight {wmin} contradicts the weight-{guarantee_weight} guarantee")
            if errs >= min_frame_errors or frames >= max_frames:
                done = True
                break
        block += nblocks
    lo, hi = wilson_interval(errs, frames)
    return FEREstimate(
        decoder=config.kind.value, alpha=channel.alpha, frames_run=frames, frame_errors=errs,
        undetected_errors=undetected, fer=errs / frames, ci_low=lo, ci_high=hi,
        avg_iterations=conv_iters / conv_count if conv_count else float("nan"),
        seed=channel.seed, stream_id=channel.stream_id,
        min_error_weight_failed=wmin, max_error_weight_failed=wmax,
    )


@dataclass
class GuaranteeReport:
    decoder: str
    weight: int
    mode: str
    patterns_tested: int
    failure_count: int
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    samples: Optional[int] = None
    seed: Optional[int] = None
    orbit_reduction: bool = False

    @property
    def certified(self) -> bool:
        """Every weight-t pattern was decoded (exhaustive mode) without failure."""
        return self.mode == "exhaustive" and self.failure_count == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["certified"] = self.certified
        return d


class BudgetExceededError(RuntimeError):
    pass


def _batched(it: Iterable[tuple[int, ...]], size: int) -> Iterator[list]:
    buf = []
    for x in it:
        buf.append(x)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def _qc_orbit_representatives(n: int, p: int, t: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """One weight-t support per orbit of the simultaneous cyclic shift inside
    every circulant block, with the orbit size."""

    def shift(s, k):
        return tuple(sorted((i // p) * p + (i % p + k) % p for i in s))

    for s in combinations(range(n), t):
        images = [shift(s, k) for k in range(p)]
        if min(images) == s:
            yield s, len(set(images))


def uniform_weight_patterns(n: int, t: int, samples: int, seed: int) -> np.ndarray:
    """``samples`` uniform weight-t supports, shape (samples, t), reproducible from seed."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = np.empty((samples, t), dtype=np.int64)
    chunk = 65536
    for start in range(0, samples, chunk):
        k = min(chunk, samples - start)
        keys = rng.random((k, n))
        out[start : start + k] = np.sort(np.argpartition(keys, t - 1, axis=1)[:, :t] if t else keys[:, :0], axis=1)
    return out


def run_guarantee(config: DecoderConfig, code: CodeSpec, t: int, mode: str = "exhaustive",
                  samples: int = 10**6, seed: int = 0, budget: int = DEFAULT_BUDGET,
                  workers: Optional[int] = None, max_failures_kept: int = 100,
                  qc_circulant: Optional[int] = None, chunk: int = 8192) -> GuaranteeReport:
    """Decode every (or ``samples`` uniformly drawn) weight-``t`` error pattern.

    ``qc_circulant`` enables orbit reduction for quasi-cyclic codes in
    exhaustive mode: one representative per cyclic orbit is decoded and its
    outcome counted for the whole orbit.
    """
    n = code.n
    if not 0 <= t <= n:
        raise ValueError("weight outside [0, n]")
    workers = workers or default_workers()
    t0 = time.perf_counter()
    weights = None
    if mode == "exhaustive":
        total = math.comb(n, t)
        if total > budget:
            raise BudgetExceededError(
                f"C({n},{t}) = {total} exceeds the budget of {budget} decodes; use sampled mode")
        if qc_circulant:
            reps = list(_qc_orbit_representatives(n, qc_circulant, t))
            source = iter([s for s, _ in reps])
            weights = [w for _, w in reps]
        else:
            source = combinations(range(n), t)
        batches = (np.array(b, dtype=np.int64).reshape(len(b), t) for b in _batched(source, chunk))
    elif mode == "sampled":
        sup_all = uniform_weight_patterns(n, t, samples, seed)
        batches = (sup_all[i : i + chunk] for i in range(0, samples, chunk))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    def work(sup):
        errors = np.zeros((sup.shape[0], n), dtype=np.uint8)
        np.put_along_axis(errors, sup, 1, axis=1)
        return sup, decode_batch(config, code, errors)

    tested = fail_count = 0
    failures: list[list[int]] = []
    offset = 0
    # rounds of `workers` batches keep memory bounded for large sweeps
    for group in _batched(batches, workers):
        for sup, res in _map_blocks(work, group, workers):
            bad = np.flatnonzero(~res.success)
            if weights is None:
                tested += sup.shape[0]
                fail_count += bad.size
            else:
                w = np.asarray(weights[offset : offset + sup.shape[0]])
                tested += int(w.sum())
                fail_count += int(w[bad].sum())
            offset += sup.shape[0]
            for i in bad:
                if len(failures) < max_failures_kept:
                    failures.append([int(x) for x in sup[i]])
    return GuaranteeReport(
        decoder=config.kind.value, weight=t, mode=mode, patterns_tested=tested,
        failure_count=fail_count, failures=failures, elapsed=time.perf_counter() - t0,
        samples=samples if mode == "sampled" else None, seed=seed if mode == "sampled" else None,
        orbit_reduction=bool(qc_circulant) and mode == "exhaustive",
    )
