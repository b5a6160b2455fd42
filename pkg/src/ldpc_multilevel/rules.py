"""Message alphabets and node update maps of the multilevel decoders.

Messages are plain signed integers in a scaled alphabet ``{0, +-L1, ..., +-LM}``.
A variable-node map sums its incoming messages with the channel value and
quantizes the sum against the threshold set; the check-node map is the
min-sum rule (product of signs times the minimum magnitude).

Two 3-bit instantiations are provided:

``LT7``  levels (2, 7, 17), thresholds (2, 7, 17), channel magnitude 3.
``NLT5`` levels (1, 3), thresholds (1, 3), channel magnitude 1, with the
         channel weight switched off when the two incoming messages are
         ``+L2`` and ``-L2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Sequence


class DecoderKind(str, enum.Enum):
    LT7 = "7lt"
    NLT5 = "5nlt"
    MINSUM = "minsum"
    BP = "bp"
    GALLAGER_B = "gallager-b"

    @property
    def quantized(self) -> bool:
        return self in (DecoderKind.LT7, DecoderKind.NLT5)


class UnsupportedDegreeError(ValueError):
    pass


# |LLR| bound for BP messages and the band treated as a tie in BP decisions
BP_CLAMP = 30.0
BP_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LevelAlphabet:
    levels: tuple[int, ...]
    thresholds: tuple[int, ...]
    channel_magnitude: int

    def __post_init__(self):
        if len(self.levels) != len(self.thresholds) or not self.levels:
            raise ValueError("need one threshold per level")
        for seq, what in ((self.levels, "levels"), (self.thresholds, "thresholds")):
            if seq[0] <= 0 or any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{what} must be positive and strictly increasing")
        if self.channel_magnitude <= 0:
            raise ValueError("channel magnitude must be positive")

    @property
    def messages(self) -> tuple[int, ...]:
        """All admissible messages, ascending."""
        return tuple(sorted({0, *self.levels, *(-x for x in self.levels)}))


def lt_alphabet(l1: int = 2, c: int = 3) -> LevelAlphabet:
    """7-level linear-threshold alphabet from ``L1`` and ``C`` (``L1 < C < 2 L1``)."""
    if not l1 < c < 2 * l1:
        raise ValueError("the 7-level alphabet needs L1 < C < 2*L1")
    l2 = 2 * l1 + c
    l3 = 2 * l2 + c
    return LevelAlphabet((l1, l2, l3), (l1, l2, l3), c)


def nlt_alphabet(l1: int = 1) -> LevelAlphabet:
    """5-level non-linear-threshold alphabet: ``C = L1``, ``L2 = 3 L1``."""
    return LevelAlphabet((l1, 3 * l1), (l1, 3 * l1), l1)


LT7 = lt_alphabet()
NLT5 = nlt_alphabet()


@dataclass(frozen=True)
class DecoderConfig:
    kind: DecoderKind
    alphabet: Optional[LevelAlphabet] = None
    max_iterations: int = 100
    bp_crossover: Optional[float] = None
    trace: bool = False

    def __post_init__(self):
        kind = DecoderKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind.quantized and self.alphabet is None:
            object.__setattr__(self, "alphabet", LT7 if kind is DecoderKind.LT7 else NLT5)
        if kind is DecoderKind.LT7:
            a = self.alphabet
            l1, l2, l3 = a.levels
            c = a.channel_magnitude
            if not (l1 < c < 2 * l1 and l2 == 2 * l1 + c and l3 == 2 * l2 + c and a.thresholds == a.levels):
                raise ValueError("alphabet violates the 7-level LT constraints")
        if kind is DecoderKind.NLT5:
            a = self.alphabet
            if len(a.levels) != 2:
                raise ValueError("the 5-level NLT decoder needs two levels")
            l1, l2 = a.levels
            if not (a.channel_magnitude == l1 and l2 == 3 * l1 and a.thresholds == a.levels):
                raise ValueError("alphabet violates the 5-level NLT constraints")
        if kind is DecoderKind.BP:
            if self.bp_crossover is None or not 0 < self.bp_crossover < 0.5:
                raise ValueError("BP needs a crossover probability in (0, 0.5)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def with_options(self, **changes) -> "DecoderConfig":
        return replace(self, **changes)

    @property
    def tie_tolerance(self) -> float:
        return BP_TIE_TOLERANCE if self.kind is DecoderKind.BP else 0.0


def quantize(alphabet: LevelAlphabet, x: int) -> int:
    """Threshold quantizer; the lower threshold of each band is inclusive."""
    mag = abs(x)
    for level, t in zip(reversed(alphabet.levels), reversed(alphabet.thresholds)):
        if mag >= t:
            return level if x > 0 else -level
    return 0


def phi_c(messages: Sequence[int]) -> int:
    if not messages:
        raise ValueError("check map needs at least one input")
    sign = 1
    for m in messages:
        if m < 0:
            sign = -sign
    return sign * min(abs(m) for m in messages)


def phi_v_lt(alphabet: LevelAlphabet, incoming: Sequence[int], y: int) -> int:
    return quantize(alphabet, sum(incoming) + y)


def _sign_bit(m) -> int:
    # sign(0) is taken as +1
    return 1 if m < 0 else 0


def omega(alphabet: LevelAlphabet, incoming: Sequence[int]) -> int:
    """Channel weight of the NLT rule. Defined only for two incoming messages."""
    if len(incoming) != 2:
        raise UnsupportedDegreeError("the channel weight function is defined for d_v = 3 only")
    m1, m2 = incoming
    l2 = alphabet.levels[1]
    differ = _sign_bit(m1) ^ _sign_bit(m2)
    return 1 - differ * int(abs(m1) + abs(m2) == 2 * l2)


def phi_v_nlt(alphabet: LevelAlphabet, incoming: Sequence[int], y: int) -> int:
    return quantize(alphabet, sum(incoming) + omega(alphabet, incoming) * y)


def hard_decision(config: DecoderConfig, all_incoming: Sequence[float], y: float) -> int:
    """Bit estimate from all incoming messages plus the unweighted channel value.

    A tie falls back to the channel bit. Ties are exact except for BP, where
    sums within ``BP_TIE_TOLERANCE`` of zero count as ties.
    """
    tie_tol = config.tie_tolerance
    s = sum(all_incoming) + y
    if s > tie_tol:
        return 0
    if s < -tie_tol:
        return 1
    return 0 if y > 0 else 1
