"""Multilevel (LT-7, NLT-5) LDPC decoders for the binary symmetric channel,
with reference decoders, trapping-set tools and a Monte Carlo harness."""

__version__ = "0.1.0"

from .code import (
    CodeFormatError,
    CodeSpec,
    QcShiftMatrix,
    TannerGraph,
    build_qc_code,
    emit_alist,
    emit_shift_matrix,
    load_code,
    parse_alist,
    parse_shift_matrix,
    syndrome,
    tanner_155,
)
from .engine import (
    BatchResult,
    DecodeOutcome,
    MessageTrace,
    decode,
    decode_batch,
    decode_bp,
    decode_gallager_b,
    decode_minsum,
)
from .rules import LT7, NLT5, DecoderConfig, DecoderKind, LevelAlphabet, UnsupportedDegreeError, lt_alphabet, nlt_alphabet
from .sim import BscChannel, ErrorPattern, FEREstimate, GuaranteeReport, run_fer, run_guarantee, sample_frame, wilson_interval
from .trapping import (
    Embedding,
    IsolationReport,
    SubgraphSpec,
    check_isolation,
    critical_number,
    decode_isolated,
    induced_subgraph,
    load_subgraph,
    mu_sequence,
)
