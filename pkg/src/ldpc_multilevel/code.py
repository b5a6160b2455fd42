"""Tanner graphs of binary LDPC codes and the file formats used to exchange them.

Node indices are 0-based everywhere inside the package. The alist format is
1-based; conversion happens only in :func:`parse_alist` / :func:`emit_alist`.

Two on-disk formats are supported:

alist (MacKay)
    ``n m`` / ``max_dv max_dc`` / variable degrees / check degrees / one line of
    check indices per variable / one line of variable indices per check.
    Zero padding on the adjacency lines is accepted on input, never written.

shift matrix (quasi-cyclic)
    ``rows cols p`` followed by ``rows`` lines of ``cols`` entries, each an
    integer shift in ``[0, p)`` or ``-`` for an all-zero block.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np


class CodeFormatError(ValueError):
    """Raised for malformed alist / shift-matrix input. Carries the 1-based line."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite variable/check adjacency.

    ``var_adj[v]`` lists the checks of variable ``v`` and ``chk_adj[c]`` the
    variables of check ``c``, both in source order.
    """

    n: int
    m: int
    var_adj: tuple[tuple[int, ...], ...]
    chk_adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.var_adj) != self.n or len(self.chk_adj) != self.m:
            raise ValueError("adjacency lengths do not match n, m")
        fwd = set()
        for v, checks in enumerate(self.var_adj):
            if not checks:
                raise ValueError(f"variable {v} has no neighbours")
            for c in checks:
                if not 0 <= c < self.m:
                    raise ValueError(f"variable {v}: check index {c} out of range")
                if (v, c) in fwd:
                    raise ValueError(f"repeated edge ({v}, {c})")
                fwd.add((v, c))
        back = set()
        for c, vs in enumerate(self.chk_adj):
            if not vs:
                raise ValueError(f"check {c} has no neighbours")
            for v in vs:
                if not 0 <= v < self.n:
                    raise ValueError(f"check {c}: variable index {v} out of range")
                if (v, c) in back:
                    raise ValueError(f"repeated edge ({v}, {c})")
                back.add((v, c))
        if fwd != back:
            raise ValueError("var_adj and chk_adj describe different edge sets")

    @classmethod
    def from_check_lists(cls, n: int, chk_adj: Sequence[Sequence[int]]) -> "TannerGraph":
        """Build from check neighbourhoods; variable lists follow check order."""
        var_adj: list[list[int]] = [[] for _ in range(n)]
        for c, vs in enumerate(chk_adj):
            for v in vs:
                var_adj[v].append(c)
        return cls(n, len(chk_adj), tuple(map(tuple, var_adj)), tuple(map(tuple, chk_adj)))

    @classmethod
    def from_matrix(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        m, n = H.shape
        return cls.from_check_lists(n, [tuple(np.flatnonzero(row)) for row in H])

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.var_adj)

    @property
    def var_degrees(self) -> list[int]:
        return [len(a) for a in self.var_adj]

    @property
    def chk_degrees(self) -> list[int]:
        return [len(a) for a in self.chk_adj]

    def edges(self) -> list[tuple[int, int]]:
        """(variable, check) pairs in variable-major source order."""
        return [(v, c) for v, checks in enumerate(self.var_adj) for c in checks]

    def to_matrix(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for v, c in self.edges():
            H[c, v] = 1
        return H


@dataclass(frozen=True)
class CodeSpec:
    graph: TannerGraph
    name: str = ""
    rate_design: Fraction = field(default=None)  # type: ignore[assignment]
    left_regular_degree: Optional[int] = None

    def __post_init__(self):
        g = self.graph
        if self.rate_design is None:
            object.__setattr__(self, "rate_design", Fraction(g.n - g.m, g.n))
        degs = set(g.var_degrees)
        regular = degs.pop() if len(degs) == 1 else None
        if self.left_regular_degree is None:
            object.__setattr__(self, "left_regular_degree", regular)
        elif self.left_regular_degree != regular:
            raise ValueError("left_regular_degree does not match the variable degrees")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m


@dataclass(frozen=True)
class QcShiftMatrix:
    """Exponent matrix of a quasi-cyclic code; ``None`` marks a zero block."""

    rows: int
    cols: int
    circulant_size: int
    entries: tuple[tuple[Optional[int], ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entries shape does not match rows x cols")
        for row in self.entries:
            for s in row:
                if s is not None and not 0 <= s < self.circulant_size:
                    raise ValueError(f"shift {s} outside [0, {self.circulant_size})")


def _lines(text: Union[str, bytes]) -> list[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if toks:
            out.append((i, toks))
    return out


def _ints(lineno: int, toks: list[str]) -> list[int]:
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise CodeFormatError(f"expected integers, got {' '.join(toks)!r}", lineno) from None


def parse_alist(text: Union[str, bytes], name: str = "") -> CodeSpec:
    """Parse MacKay alist text into a validated :class:`CodeSpec`.

    Both adjacency halves of the file are read and must agree with each
    other and with the declared degree lists.
    """
    lines = _lines(text)
    if len(lines) < 4:
        raise CodeFormatError("truncated header", lines[-1][0] if lines else 1)
    (l1, t1), (l2, t2), (l3, t3), (l4, t4) = lines[:4]
    head = _ints(l1, t1)
    if len(head) != 2 or min(head) < 1:
        raise CodeFormatError("first line must be 'n m' with positive values", l1)
    n, m = head
    maxes = _ints(l2, t2)
    if len(maxes) != 2:
        raise CodeFormatError("second line must be 'max_var_degree max_chk_degree'", l2)
    vdeg = _ints(l3, t3)
    cdeg = _ints(l4, t4)
    if len(vdeg) != n:
        raise CodeFormatError(f"expected {n} variable degrees, got {len(vdeg)}", l3)
    if len(cdeg) != m:
        raise CodeFormatError(f"expected {m} check degrees, got {len(cdeg)}", l4)
    if max(vdeg) != maxes[0] or max(cdeg) != maxes[1]:
        raise CodeFormatError("maximum degrees disagree with the degree lists", l2)
    body = lines[4:]
    if len(body) < n + m:
        where = body[-1][0] if body else l4
        raise CodeFormatError(f"expected {n + m} adjacency lines, got {len(body)}", where)

    def read_block(rows, degs, bound, width, what):
        adj = []
        for (lineno, toks), d in zip(rows, degs):
            vals = _ints(lineno, toks)
            nz = vals[:d]
            pad = vals[d:]
            if 0 in nz:
                raise CodeFormatError("index 0 is invalid (alist indices are 1-based)", lineno)
            if len(nz) != d or any(pad):
                raise CodeFormatError(f"{what} degree {d} but {len(vals) - pad.count(0)} indices listed", lineno)
            if pad and len(vals) != width:
                raise CodeFormatError("padding zeros must fill the line to the maximum degree", lineno)
            for x in nz:
                if not 1 <= x <= bound:
                    raise CodeFormatError(f"index {x} out of range 1..{bound}", lineno)
            if len(set(nz)) != len(nz):
                raise CodeFormatError("repeated index", lineno)
            adj.append(tuple(x - 1 for x in nz))
        return tuple(adj)

    var_adj = read_block(body[:n], vdeg, m, maxes[0], "variable")
    chk_adj = read_block(body[n : n + m], cdeg, n, maxes[1], "check")
    if len(body) > n + m:
        raise CodeFormatError("trailing content after adjacency lists", body[n + m][0])
    try:
        graph = TannerGraph(n, m, var_adj, chk_adj)
    except ValueError as exc:
        raise CodeFormatError(str(exc), body[0][0]) from None
    return CodeSpec(graph, name=name)


def emit_alist(code: CodeSpec) -> bytes:
    g = code.graph
    vdeg, cdeg = g.var_degrees, g.chk_degrees
    rows = [
        f"{g.n} {g.m}",
        f"{max(vdeg)} {max(cdeg)}",
        " ".join(map(str, vdeg)),
        " ".join(map(str, cdeg)),
    ]
    rows += [" ".join(str(c + 1) for c in a) for a in g.var_adj]
    rows += [" ".join(str(v + 1) for v in a) for a in g.chk_adj]
    return ("\n".join(rows) + "\n").encode("ascii")


def parse_shift_matrix(text: Union[str, bytes]) -> QcShiftMatrix:
    lines = _lines(text)
    if not lines:
        raise CodeFormatError("empty shift-matrix file", 1)
    l1, t1 = lines[0]
    head = _ints(l1, t1)
    if len(head) != 3 or min(head) < 1:
        raise CodeFormatError("first line must be 'rows cols p'", l1)
    rows, cols, p = head
    if len(lines) != rows + 1:
        raise CodeFormatError(f"expected {rows} matrix rows, got {len(lines) - 1}", lines[-1][0])
    entries = []
    for lineno, toks in lines[1:]:
        if len(toks) != cols:
            raise CodeFormatError(f"expected {cols} entries, got {len(toks)}", lineno)
        row = []
        for t in toks:
            if t == "-":
                row.append(None)
                continue
            (s,) = _ints(lineno, [t])
            if not 0 <= s < p:
                raise CodeFormatError(f"shift {s} outside [0, {p})", lineno)
            row.append(s)
        entries.append(tuple(row))
    return QcShiftMatrix(rows, cols, p, tuple(entries))


def emit_shift_matrix(shifts: QcShiftMatrix) -> bytes:
    rows = [f"{shifts.rows} {shifts.cols} {shifts.circulant_size}"]
    for r in shifts.entries:
        rows.append(" ".join("-" if s is None else str(s) for s in r))
    return ("\n".join(rows) + "\n").encode("ascii")


def build_qc_code(shifts: QcShiftMatrix, name: str = "") -> CodeSpec:
    """Expand circulant blocks: block (i, j) with shift s joins variable
    ``j*p + k`` to check ``i*p + (k + s) % p``."""
    p = shifts.circulant_size
    n, m = shifts.cols * p, shifts.rows * p
    var_adj: list[list[int]] = [[] for _ in range(n)]
    chk_adj: list[list[int]] = [[] for _ in range(m)]
    for j in range(shifts.cols):
        for k in range(p):
            v = j * p + k
            for i in range(shifts.rows):
                s = shifts.entries[i][j]
                if s is not None:
                    var_adj[v].append(i * p + (k + s) % p)
    for v, checks in enumerate(var_adj):
        for c in checks:
            chk_adj[c].append(v)
    for a in chk_adj:
        a.sort()
    graph = TannerGraph(n, m, tuple(map(tuple, var_adj)), tuple(map(tuple, chk_adj)))
    return CodeSpec(graph, name=name)


def syndrome(code: Union[CodeSpec, TannerGraph], hard_decision) -> np.ndarray:
    g = code.graph if isinstance(code, CodeSpec) else code
    x = np.asarray(hard_decision, dtype=np.uint8)
    if x.shape != (g.n,):
        raise ValueError(f"hard decision has length {x.size}, code length is {g.n}")
    return np.array([np.bitwise_xor.reduce(x[list(vs)]) for vs in g.chk_adj], dtype=np.uint8)


def load_code(path: Union[str, Path]) -> CodeSpec:
    """Read an alist (``.alist``) or shift-matrix (``.qc``) file."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".qc":
        return build_qc_code(parse_shift_matrix(data), name=path.stem)
    return parse_alist(data, name=path.stem)


def file_digest(path: Union[str, Path]) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def tanner_155() -> CodeSpec:
    """The (155, 64) Tanner code shipped with the package."""
    from importlib.resources import files

    text = files("ldpc_multilevel").joinpath("data/tanner155.qc").read_bytes()
    return build_qc_code(parse_shift_matrix(text), name="tanner155")
