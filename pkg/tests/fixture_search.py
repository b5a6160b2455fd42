"""Search programs that reconstruct the trapping-set fixtures shipped in
``ldpc_multilevel/data``.

Both searches draw random 3-left-regular subgraphs from a configuration model
with a prescribed check-degree multiset, reject graphs with 4-cycles, and keep
the first graph (in draw order, fixed seed) that passes every filter.

Run as a script to regenerate the files::

    python tests/fixture_search.py
"""

from __future__ import annotations

import random
from itertools import combinations
from pathlib import Path

from ldpc_multilevel.rules import LT7, DecoderConfig, DecoderKind
from ldpc_multilevel.trapping import SubgraphSpec, decode_isolated, emit_subgraph, induced_subgraph

DATA = Path(__file__).resolve().parents[1] / "src" / "ldpc_multilevel" / "data"

L1 = LT7.levels[0]


def random_subgraph(rng: random.Random, a: int, check_sizes: list[int]):
    """One configuration-model draw; None if it has repeated edges or 4-cycles."""
    slots = [v for v in range(a) for _ in range(3)]
    rng.shuffle(slots)
    checks, i = [], 0
    for size in check_sizes:
        grp = slots[i : i + size]
        i += size
        if len(set(grp)) != size:
            return None
        checks.append(sorted(grp))
    seen = set()
    for grp in checks:
        for pair in combinations(grp, 2):
            if pair in seen:
                return None
            seen.add(pair)
    checks.sort(key=lambda c: (len(c), c))
    return checks


def variable_graph_has_triangle(checks) -> bool:
    pairs = {p for c in checks for p in combinations(c, 2)}
    nodes = {v for c in checks for v in c}
    return any({(x, y), (x, z), (y, z)} <= pairs for x, y, z in combinations(sorted(nodes), 3))


def contains_label(sub: SubgraphSpec, a: int, b: int) -> bool:
    return any(induced_subgraph(sub.graph, vs)[0].label == (a, b) for vs in combinations(range(sub.a), a))


def example_trace_matches(sub: SubgraphSpec) -> bool:
    """Quoted messages of the 3-error example on the (9,5) subgraph (errors on v1..v3)."""
    tr = decode_isolated(DecoderConfig(DecoderKind.LT7), sub, [0, 1, 2])
    if tr.converged_at != 3:
        return False
    m = tr.messages
    for v in range(sub.a):
        expect = -L1 if v < 3 else L1
        if m.outgoing(1, v) != [expect] * 3:
            return False
    if any(m.incoming(1, v) != [-L1] * 3 for v in (3, 4)):
        return False
    if any(m.outgoing(2, v) != [0, 0, 0] for v in range(5)):
        return False
    if any(sorted(m.incoming(2, v)) != [0, 0, L1] for v in (0, 1)):
        return False
    ms = decode_isolated(DecoderConfig(DecoderKind.MINSUM), sub, [0, 1, 2])
    return ms.converged_at == 4


def corrects_all_up_to(sub: SubgraphSpec, t: int) -> bool:
    cfg = DecoderConfig(DecoderKind.LT7)
    return all(
        decode_isolated(cfg, sub, s).converged_at is not None
        for w in range(1, t + 1)
        for s in combinations(range(sub.a), w)
    )


def search_9_5(seed: int = 2010, max_draws: int = 2_000_000):
    rng = random.Random(seed)
    sizes = [1, 1, 1, 3, 3] + [2] * 9
    for draw in range(max_draws):
        checks = random_subgraph(rng, 9, sizes)
        if checks is None:
            continue
        sub = SubgraphSpec.from_check_lists(9, checks)
        if sub.label != (9, 5) or len(sub.degree_one_checks) != 3:
            continue
        if not example_trace_matches(sub):
            continue
        if not contains_label(sub, 6, 2) or not corrects_all_up_to(sub, 3):
            continue
        return sub, draw
    raise RuntimeError("no (9,5) subgraph found")


def search_6_2(seed: int = 2010, max_draws: int = 1_000_000):
    rng = random.Random(seed)
    sizes = [1, 1] + [2] * 8
    for draw in range(max_draws):
        checks = random_subgraph(rng, 6, sizes)
        if checks is None or variable_graph_has_triangle(checks):
            continue
        sub = SubgraphSpec.from_check_lists(6, checks)
        if sub.label == (6, 2):
            return sub, draw
    raise RuntimeError("no (6,2) subgraph found")


if __name__ == "__main__":
    for fname, fn in (("ts_9_5.txt", search_9_5), ("ts_6_2.txt", search_6_2)):
        sub, draw = fn()
        (DATA / fname).write_bytes(emit_subgraph(sub))
        print(fname, "draw", draw, sub.graph.chk_adj)
