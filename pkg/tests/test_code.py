import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpc_multilevel.code import (
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

SINGLE_CHECK = b"2 1\n1 2\n1 1\n2\n1\n1\n1 2\n"


def test_single_check_alist():
    c = parse_alist(SINGLE_CHECK)
    assert (c.n, c.m) == (2, 1)
    assert c.graph.chk_adj == ((0, 1),)
    assert c.graph.var_adj == ((0,), (0,))


def test_single_check_round_trip_exact():
    assert emit_alist(parse_alist(SINGLE_CHECK)) == SINGLE_CHECK


def test_zero_index_rejected_with_line():
    bad = b"2 1\n1 2\n1 1\n2\n0\n1\n1 2\n"
    with pytest.raises(CodeFormatError, match="1-based") as exc:
        parse_alist(bad)
    assert exc.value.line == 5


@pytest.mark.parametrize(
    "text, line",
    [
        (b"2\n", 1),  # short header
        (b"2 1\n1 2\n1 1\n2 2\n", 4),  # wrong number of check degrees
        (b"2 1\n1 2\n1 1\n2\n3\n1\n1 2\n", 5),  # index beyond m
        (b"2 1\n1 2\n1 1\n2\n1\n1\n1 1\n", 7),  # repeated variable in a check
        (b"2 1\n1 2\n1 1\n2\n1\n1\n1 2\n9\n", 8),  # trailing content
        (b"3 1\n1 2\n1 1 1\n2\n1\n1\n1\n1 2\n", None),  # variable 3 missing from its check
        (b"2 1\n1 3\n1 1\n2\n1\n1\n1 2\n", None),  # declared max degree wrong
    ],
)
def test_malformed_alist(text, line):
    with pytest.raises(CodeFormatError) as exc:
        parse_alist(text)
    if line is not None:
        assert exc.value.line == line


def test_padding_accepted_never_emitted():
    # variable 2 has degree 1 and is padded to max_var_degree 2
    padded = b"2 2\n2 2\n2 1\n2 1\n1 2\n1 0\n1 2\n1 0\n"
    c = parse_alist(padded)
    assert c.graph.var_adj == ((0, 1), (0,))
    out = emit_alist(c)
    assert b" 0" not in out.split(b"\n", 4)[4]
    assert parse_alist(out).graph == c.graph


def test_padding_misuse():
    # a zero inside the live part of the list
    with pytest.raises(CodeFormatError):
        parse_alist(b"2 2\n2 2\n2 1\n2 1\n1 2\n0 1\n1 2\n1 0\n")


def test_edge_order_preserved():
    text = b"3 1\n1 3\n1 1 1\n3\n1\n1\n1\n3 1 2\n"
    c = parse_alist(text)
    assert c.graph.chk_adj == ((2, 0, 1),)
    assert parse_alist(emit_alist(c)).graph.chk_adj == ((2, 0, 1),)


def test_tanner_code_properties():
    c = tanner_155()
    assert (c.n, c.m) == (155, 93)
    assert c.left_regular_degree == 3
    assert set(c.graph.chk_degrees) == {5}
    re = parse_alist(emit_alist(c))
    assert re.graph.num_edges == 465
    assert re.graph == c.graph


def test_shipped_alist_matches_shift_matrix():
    from importlib.resources import files

    alist = load_code(files("ldpc_multilevel") / "data" / "tanner155.alist")
    assert alist.graph == tanner_155().graph


def test_qc_identity():
    c = build_qc_code(QcShiftMatrix(1, 1, 3, ((0,),)))
    assert c.graph.chk_adj == ((0,), (1,), (2,))


def test_qc_two_blocks():
    c = build_qc_code(QcShiftMatrix(1, 2, 2, ((0, 1),)))
    assert [set(x) for x in c.graph.chk_adj] == [{0, 3}, {1, 2}]


def test_qc_zero_block_degrees():
    sm = parse_shift_matrix("2 3 4\n0 - 1\n2 3 -\n")
    c = build_qc_code(sm)
    assert c.graph.var_degrees == [2] * 4 + [1] * 4 + [1] * 4
    assert c.graph.chk_degrees == [2] * 8
    assert c.left_regular_degree is None
    assert parse_shift_matrix(emit_shift_matrix(sm)) == sm


def test_shift_out_of_range():
    with pytest.raises(CodeFormatError):
        parse_shift_matrix("1 1 3\n3\n")


def test_shift_matrix_error_line():
    with pytest.raises(CodeFormatError) as exc:
        parse_shift_matrix("2 2 3\n0 1\n1 x\n")
    assert exc.value.line == 3


def test_syndrome_examples():
    c = tanner_155()
    assert not syndrome(c, np.zeros(155, dtype=np.uint8)).any()
    e = np.zeros(155, dtype=np.uint8)
    e[17] = 1
    assert set(np.flatnonzero(syndrome(c, e))) == set(c.graph.var_adj[17])
    # two variables sharing one check
    v = 0
    shared = c.graph.var_adj[v][0]
    u = next(x for x in c.graph.chk_adj[shared] if x != v)
    e[:] = 0
    e[[u, v]] = 1
    s = set(np.flatnonzero(syndrome(c, e)))
    assert s == set(c.graph.var_adj[u]) ^ set(c.graph.var_adj[v])
    assert shared not in s


def test_syndrome_length_mismatch():
    with pytest.raises(ValueError):
        syndrome(tanner_155(), [0, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=155, max_size=155), st.lists(st.integers(0, 1), min_size=155, max_size=155))
def test_syndrome_linear(a, b):
    c = tanner_155()
    a, b = np.array(a, dtype=np.uint8), np.array(b, dtype=np.uint8)
    assert np.array_equal(syndrome(c, a ^ b), syndrome(c, a) ^ syndrome(c, b))


@st.composite
def random_graphs(draw):
    n = draw(st.integers(1, 8))
    m = draw(st.integers(1, 6))
    rows = [sorted(draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))) for _ in range(m)]
    covered = {v for r in rows for v in r}
    for v in range(n):
        if v not in covered:
            rows[0].append(v)
    rows = [draw(st.permutations(r)) for r in rows]
    return TannerGraph.from_check_lists(n, rows)


@settings(max_examples=100, deadline=None)
@given(random_graphs())
def test_alist_round_trip_property(g):
    c = CodeSpec(g, "random")
    back = parse_alist(emit_alist(c))
    assert back.graph == g
    assert emit_alist(back) == emit_alist(c)


@settings(max_examples=60, deadline=None)
@given(random_graphs())
def test_adjacency_bijection(g):
    edges_v = {(v, c) for v, cs in enumerate(g.var_adj) for c in cs}
    edges_c = {(v, c) for c, vs in enumerate(g.chk_adj) for v in vs}
    assert edges_v == edges_c


def test_tanner_graph_rejects_inconsistent():
    with pytest.raises(ValueError):
        TannerGraph(2, 1, ((0,), ()), ((0, 1),))
    with pytest.raises(ValueError):
        TannerGraph(2, 1, ((0,), (0,)), ((0, 0),))


def test_left_regular_validated():
    g = TannerGraph.from_check_lists(2, [[0, 1], [0]])
    with pytest.raises(ValueError):
        CodeSpec(g, "x", left_regular_degree=2)
