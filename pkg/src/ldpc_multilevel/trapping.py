"""Decoding on isolated trapping-set subgraphs.

A trapping-set subgraph ``H`` (variables ``P``, checks ``W``) is decoded on
its own. Each degree-one check of ``H`` stands in for the rest of the host
graph. If the host neighbourhood is tree-like and error free, the message such
a check delivers in iteration ``l`` is the fixed recursion

    mu_0 = 0,   mu_l = Phi_v(mu_{l-1}, mu_{l-1}, +C)

so the harness injects ``mu_l`` on those edges instead of running the check
rule. :func:`check_isolation` verifies, on computation trees of a concrete
host code, that the host really is tree-like enough for ``k`` iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from .code import CodeFormatError, CodeSpec, TannerGraph
from .engine import STOP_ALL_ZERO, MessageTrace, run
from .rules import DecoderConfig, DecoderKind, phi_v_lt, phi_v_nlt
from .sim import ErrorPattern

MAX_EXHAUSTIVE_VARIABLES = 24


@dataclass(frozen=True)
class SubgraphSpec:
    graph: TannerGraph
    degree_one_checks: tuple[int, ...] = None  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        degs = self.graph.chk_degrees
        if self.degree_one_checks is None:
            object.__setattr__(self, "degree_one_checks", tuple(c for c, d in enumerate(degs) if d == 1))
        for c in self.degree_one_checks:
            if not 0 <= c < self.graph.m or degs[c] != 1:
                raise ValueError(f"check {c} is not a degree-one check of the subgraph")

    @classmethod
    def from_check_lists(cls, a: int, chk_adj: Sequence[Sequence[int]], degree_one_checks=None,
                         name: str = "") -> "SubgraphSpec":
        return cls(TannerGraph.from_check_lists(a, chk_adj), degree_one_checks, name)

    @property
    def a(self) -> int:
        return self.graph.n

    @property
    def b(self) -> int:
        return sum(d % 2 for d in self.graph.chk_degrees)

    @property
    def label(self) -> tuple[int, int]:
        return self.a, self.b

    @property
    def boundary_variables(self) -> tuple[int, ...]:
        """Variables with at least one degree-one check neighbour."""
        d1 = set(self.degree_one_checks)
        return tuple(v for v, cs in enumerate(self.graph.var_adj) if d1.intersection(cs))

    def injected_edges(self) -> list[int]:
        edges = self.graph.edges()
        d1 = set(self.degree_one_checks)
        return [e for e, (_, c) in enumerate(edges) if c in d1]


def induced_subgraph(code: Union[CodeSpec, TannerGraph], variables: Sequence[int]) -> tuple[SubgraphSpec, "Embedding"]:
    """Subgraph induced by ``variables`` together with its embedding into the code."""
    g = code.graph if isinstance(code, CodeSpec) else code
    variables = list(variables)
    pos = {v: i for i, v in enumerate(variables)}
    checks: list[int] = []
    for v in variables:
        for c in g.var_adj[v]:
            if c not in checks:
                checks.append(c)
    chk_lists = [[pos[v] for v in g.chk_adj[c] if v in pos] for c in checks]
    sub = SubgraphSpec.from_check_lists(len(variables), chk_lists)
    return sub, Embedding(tuple(variables), tuple(checks))


def parse_subgraph(text: Union[str, bytes], name: str = "") -> SubgraphSpec:
    """Read the subgraph format: ``a w`` / degree-one checks / one line per check."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    raw = text.splitlines()
    if len(raw) < 2:
        raise CodeFormatError("subgraph file needs a header and a degree-one line", len(raw) or 1)
    try:
        a, w = map(int, raw[0].split())
        d1 = [int(t) for t in raw[1].split()]
    except ValueError:
        raise CodeFormatError("malformed header", 1) from None
    rows = raw[2 : 2 + w]
    if len(rows) != w or any(line.strip() for line in raw[2 + w :]):
        raise CodeFormatError(f"expected exactly {w} check lines", len(raw))
    chk = []
    for i, line in enumerate(rows, start=3):
        try:
            vs = [int(t) for t in line.split()]
        except ValueError:
            raise CodeFormatError("expected integers", i) from None
        if not vs or any(not 0 <= v < a for v in vs):
            raise CodeFormatError("check line empty or variable index out of range", i)
        chk.append(vs)
    try:
        return SubgraphSpec.from_check_lists(a, chk, tuple(d1), name)
    except ValueError as exc:
        raise CodeFormatError(str(exc)) from None


def emit_subgraph(sub: SubgraphSpec) -> bytes:
    g = sub.graph
    lines = [f"{g.n} {g.m}", " ".join(map(str, sub.degree_one_checks))]
    lines += [" ".join(map(str, vs)) for vs in g.chk_adj]
    return ("\n".join(lines) + "\n").encode("ascii")


def load_subgraph(path) -> SubgraphSpec:
    p = Path(path)
    return parse_subgraph(p.read_bytes(), name=p.stem)


# ---------------------------------------------------------------- recursion and harness


def _check_kind(config: DecoderConfig):
    if config.kind not in (DecoderKind.LT7, DecoderKind.NLT5, DecoderKind.MINSUM):
        raise ValueError(f"isolated analysis supports 7lt, 5nlt and minsum, not {config.kind.value}")


def mu_sequence(config: DecoderConfig, k: int) -> list:
    """``[mu_0, ..., mu_k]`` for the degree-one checks of an isolated subgraph."""
    _check_kind(config)
    if k < 1:
        raise ValueError("k must be at least 1")
    mu = [0]
    for _ in range(k):
        prev = mu[-1]
        if config.kind is DecoderKind.MINSUM:
            mu.append(2 * prev + 1)
        elif config.kind is DecoderKind.LT7:
            mu.append(phi_v_lt(config.alphabet, [prev, prev], config.alphabet.channel_magnitude))
        else:
            mu.append(phi_v_nlt(config.alphabet, [prev, prev], config.alphabet.channel_magnitude))
    return mu


@dataclass
class IsolationTrace:
    decoder: str
    mu: list
    messages: MessageTrace
    converged_at: Optional[int]
    iterations_run: int
    horizon: Optional[int] = None
    beyond_horizon: bool = False

    def to_dict(self) -> dict:
        return {
            "decoder": self.decoder,
            "mu": [_num(x) for x in self.mu],
            "converged_at": self.converged_at,
            "iterations_run": self.iterations_run,
            "horizon": self.horizon,
            "beyond_horizon": self.beyond_horizon,
            "edges": [list(e) for e in self.messages.edges],
            "v2c": [[_num(x) for x in row] for row in self.messages.v2c],
            "c2v": [[_num(x) for x in row] for row in self.messages.c2v],
            "decisions": self.messages.decisions.tolist(),
        }


def _num(x):
    x = x.item() if hasattr(x, "item") else x
    return int(x) if float(x).is_integer() else x


def decode_isolated(config: DecoderConfig, sub: SubgraphSpec, pattern, k: Optional[int] = None,
                    horizon: Optional[int] = None) -> IsolationTrace:
    """Decode an error pattern supported on the subgraph variables.

    ``k`` caps the iterations (default ``config.max_iterations``). Up to
    ``horizon`` iterations the degree-one checks inject ``mu_l``; past it they
    keep injecting ``mu_horizon`` (the fixed point for the quantized decoders).
    Success means every subgraph variable decides 0.
    """
    _check_kind(config)
    if not isinstance(pattern, ErrorPattern):
        support = sorted(int(i) for i in pattern)
        if support and (support[0] < 0 or support[-1] >= sub.a):
            raise ValueError("error pattern support lies outside the subgraph variables")
        pattern = ErrorPattern(tuple(support), sub.a)
    elif pattern.n != sub.a:
        raise ValueError("error pattern support lies outside the subgraph variables")
    T = k or config.max_iterations
    mu = mu_sequence(config, T)
    if horizon is not None and horizon < T:
        mu = mu[: horizon + 1] + [mu[horizon]] * (T - horizon)
    cfg = config.with_options(max_iterations=T)
    out = run(cfg, sub.graph, pattern.to_bits(), stop_mode=STOP_ALL_ZERO,
              inject_edges=sub.injected_edges(), inject_values=mu[1:], trace=True)
    at = out.iterations_used if out.converged else None
    return IsolationTrace(
        decoder=config.kind.value, mu=mu[: out.iterations_used + 1], messages=out.trace,
        converged_at=at, iterations_run=out.iterations_used, horizon=horizon,
        beyond_horizon=horizon is not None and out.iterations_used > horizon,
    )


def enumerate_patterns(sub: Union[SubgraphSpec, int], weight: int) -> Iterator[ErrorPattern]:
    a = sub.a if isinstance(sub, SubgraphSpec) else int(sub)
    if not 0 <= weight <= a:
        raise ValueError("weight outside [0, a]")
    for s in combinations(range(a), weight):
        yield ErrorPattern(s, a)


@dataclass
class CriticalNumberResult:
    decoder: str
    label: tuple[int, int]
    critical_number: Optional[int]
    witness: Optional[ErrorPattern]
    patterns_tested: int

    def to_dict(self) -> dict:
        return {
            "decoder": self.decoder,
            "label": list(self.label),
            "critical_number": self.critical_number if self.critical_number is not None else f"none <= {self.label[0]}",
            "witness": list(self.witness.support) if self.witness else None,
            "patterns_tested": self.patterns_tested,
        }


def critical_number(config: DecoderConfig, sub: SubgraphSpec, k: Optional[int] = None,
                    horizon: Optional[int] = None, max_weight: Optional[int] = None) -> CriticalNumberResult:
    """Smallest error weight on the subgraph that the isolated decoder fails on.

    Patterns are tried by increasing weight, lexicographically within a weight;
    the first failure is the witness.
    """
    if sub.a > MAX_EXHAUSTIVE_VARIABLES:
        raise ValueError(f"exhaustive search limited to {MAX_EXHAUSTIVE_VARIABLES} variables")
    tested = 0
    for w in range(1, (max_weight or sub.a) + 1):
        for pat in enumerate_patterns(sub, w):
            tested += 1
            if decode_isolated(config, sub, pat, k=k, horizon=horizon).converged_at is None:
                return CriticalNumberResult(config.kind.value, sub.label, w, pat, tested)
    return CriticalNumberResult(config.kind.value, sub.label, None, None, tested)


# ---------------------------------------------------------------- isolation assumption


@dataclass(frozen=True)
class Embedding:
    """Host indices of the subgraph variables and checks."""

    variables: tuple[int, ...]
    checks: tuple[int, ...]


def parse_embedding(text: Union[str, bytes], sub: SubgraphSpec) -> Embedding:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    pairs = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            h, g = map(int, line.split())
        except ValueError:
            raise CodeFormatError("expected 'H_index G_index'", i) from None
        pairs.append((i, h, g))
    a, w = sub.a, sub.graph.m
    if len(pairs) != a + w:
        raise CodeFormatError(f"expected {a + w} lines (variables first, then checks)")
    for pos, (i, h, _) in enumerate(pairs):
        if h != (pos if pos < a else pos - a):
            raise CodeFormatError("H indices must run 0..a-1 then 0..w-1", i)
    return Embedding(tuple(g for _, _, g in pairs[:a]), tuple(g for _, _, g in pairs[a:]))


def emit_embedding(emb: Embedding) -> bytes:
    lines = [f"{i} {g}" for i, g in enumerate(emb.variables)]
    lines += [f"{i} {g}" for i, g in enumerate(emb.checks)]
    return ("\n".join(lines) + "\n").encode("ascii")


def validate_embedding(g: TannerGraph, sub: SubgraphSpec, emb: Embedding) -> None:
    h = sub.graph
    if len(emb.variables) != h.n or len(emb.checks) != h.m:
        raise ValueError("embedding size does not match the subgraph")
    if len(set(emb.variables)) != h.n or len(set(emb.checks)) != h.m:
        raise ValueError("embedding is not injective")
    if any(not 0 <= v < g.n for v in emb.variables) or any(not 0 <= c < g.m for c in emb.checks):
        raise ValueError("embedding index out of range")
    for v, c in h.edges():
        if emb.checks[c] not in g.var_adj[emb.variables[v]]:
            raise ValueError(f"subgraph edge ({v}, {c}) is not an edge of the host")
    for p, gv in enumerate(emb.variables):
        if len(g.var_adj[gv]) != len(h.var_adj[p]):
            raise ValueError(f"host variable {gv} has checks outside the subgraph; H is not induced")
    hp = set(emb.variables)
    for w, gc in enumerate(emb.checks):
        inside = sum(1 for v in g.chk_adj[gc] if v in hp)
        if inside != len(h.chk_adj[w]):
            raise ValueError(f"host check {gc} meets the subgraph in {inside} variables, H lists {len(h.chk_adj[w])}")


@dataclass
class IsolationReport:
    isolated: bool
    k: int
    violation: Optional[dict] = None
    roots_checked: list = field(default_factory=list)

    def __bool__(self):
        return self.isolated

    def to_dict(self) -> dict:
        return {"isolated": self.isolated, "k": self.k, "violation": self.violation}


class _Tree:
    """Computation tree of a Tanner graph rooted at a variable, to a fixed depth.

    Labels are ``(0, v)`` for variables and ``(1, c)`` for checks. ``desc[x]``
    is the label set of the strict descendants of vertex ``x``.
    """

    def __init__(self, g: TannerGraph, root: int, depth: int):
        self.label = [(0, root)]
        self.parent = [-1]
        self.depth = [0]
        self.children: list[list[int]] = [[]]
        frontier = [0]
        for d in range(1, depth + 1):
            nxt = []
            for x in frontier:
                kind, node = self.label[x]
                par = self.parent[x]
                plabel = self.label[par][1] if par >= 0 else None
                nbrs = g.var_adj[node] if kind == 0 else g.chk_adj[node]
                for u in nbrs:
                    if u == plabel:
                        continue
                    self.label.append((1 - kind, u))
                    self.parent.append(x)
                    self.depth.append(d)
                    self.children.append([])
                    self.children[x].append(len(self.label) - 1)
                    nxt.append(len(self.label) - 1)
            frontier = nxt
        N = len(self.label)
        self.desc: list[frozenset] = [frozenset()] * N
        for x in range(N - 1, -1, -1):
            s = set()
            for ch in self.children[x]:
                s.add(self.label[ch])
                s |= self.desc[ch]
            self.desc[x] = frozenset(s)
        # preorder intervals for ancestor tests
        self.tin = [0] * N
        self.tout = [0] * N
        clock = 0
        stack = [(0, False)]
        while stack:
            x, leaving = stack.pop()
            if leaving:
                self.tout[x] = clock
                continue
            self.tin[x] = clock
            clock += 1
            stack.append((x, True))
            for ch in reversed(self.children[x]):
                stack.append((ch, False))

    def comparable(self, x: int, z: int) -> bool:
        def anc(p, q):
            return self.tin[p] <= self.tin[q] and self.tout[q] <= self.tout[p]

        return anc(x, z) or anc(z, x)


def check_isolation(code: Union[CodeSpec, TannerGraph], sub: SubgraphSpec, embedding: Embedding,
                    k: int) -> IsolationReport:
    """Test whether the embedded subgraph satisfies the isolation assumption for ``k`` iterations.

    For every root in ``P`` the host computation tree is expanded to depth
    ``2k`` and two conditions are checked on descendant label sets:

    (i)  a degree-one check below a boundary variable shares no descendant
         with the other checks below that variable;
    (ii) two non-nested copies of distinct remaining checks of ``W`` share
         descendants only inside ``P`` and ``W``.

    Copies of the same subgraph node may repeat; only distinct checks are
    compared in (ii).
    """
    g = code.graph if isinstance(code, CodeSpec) else code
    validate_embedding(g, sub, embedding)
    if k < 1:
        raise ValueError("k must be at least 1")
    w1 = {(1, embedding.checks[c]) for c in sub.degree_one_checks}
    w_rest = {(1, c) for c in embedding.checks} - w1
    p_prime = {(0, embedding.variables[v]) for v in sub.boundary_variables}
    inside = {(0, v) for v in embedding.variables} | {(1, c) for c in embedding.checks}
    report = IsolationReport(True, k)
    for root in embedding.variables:
        report.roots_checked.append(root)
        tree = _Tree(g, root, 2 * k)
        order = sorted(range(len(tree.label)), key=lambda x: tree.depth[x])
        for x in order:
            if tree.label[x] not in w1 or tree.parent[x] < 0:
                continue
            par = tree.parent[x]
            if tree.label[par] not in p_prime:
                continue
            for sib in tree.children[par]:
                if sib == x:
                    continue
                common = tree.desc[x] & tree.desc[sib]
                if common:
                    report.isolated = False
                    report.violation = _violation("i", root, tree, x, sib, common)
                    return report
        rest = [x for x in order if tree.label[x] in w_rest]
        for i, x in enumerate(rest):
            for z in rest[i + 1 :]:
                if tree.label[x] == tree.label[z] or tree.comparable(x, z):
                    continue
                outside = (tree.desc[x] & tree.desc[z]) - inside
                if outside:
                    report.isolated = False
                    report.violation = _violation("ii", root, tree, x, z, outside)
                    return report
    return report


def _violation(cond, root, tree, x, z, common) -> dict:
    names = {0: "v", 1: "c"}
    fmt = lambda lab: f"{names[lab[0]]}{lab[1]}"  # noqa: E731
    return {
        "condition": cond,
        "root": int(root),
        "vertices": [fmt(tree.label[x]), fmt(tree.label[z])],
        "depth": max(tree.depth[x], tree.depth[z]),
        "shared": sorted(fmt(lab) for lab in common)[:8],
    }


__all__ = [
    "SubgraphSpec", "Embedding", "IsolationTrace", "IsolationReport", "CriticalNumberResult",
    "induced_subgraph", "parse_subgraph", "emit_subgraph", "load_subgraph", "parse_embedding",
    "emit_embedding", "mu_sequence", "decode_isolated", "enumerate_patterns", "critical_number",
    "check_isolation", "validate_embedding",
]
