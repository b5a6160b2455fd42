"""Follow the 7-level decoder through the (9,5) trapping set, one iteration at a time.

Three errors sit on variables 0, 1 and 2. The three degree-one checks
stand in for the rest of the code: they inject mu_l, the strongest
message an isolated neighborhood can send in iteration l.
"""

from importlib.resources import files

from ldpc_multilevel import DecoderConfig, decode_isolated, load_subgraph, mu_sequence

sub = load_subgraph(files("ldpc_multilevel") / "data" / "ts_9_5.txt")
print(f"subgraph label {sub.label}, degree-one checks {sub.degree_one_checks}")

for kind in ("7lt", "minsum"):
    cfg = DecoderConfig(kind)
    print(f"\n{kind}: mu_1..mu_5 = {mu_sequence(cfg, 5)[1:]}")
    tr = decode_isolated(cfg, sub, [0, 1, 2], k=10)
    m = tr.messages
    for it in range(1, tr.iterations_run + 1):
        print(f"  iteration {it}")
        for v in range(sub.a):
            print(f"    v{v}: out {m.outgoing(it, v)}  in {m.incoming(it, v)}  decides {m.decisions[it - 1][v]}")
    print(f"  converged at iteration {tr.converged_at}")

# Freezing mu after l=2 weakens the outside help; the escape takes longer.
for horizon in (None, 2, 1):
    tr = decode_isolated(DecoderConfig("minsum"), sub, [0, 1, 2], k=20, horizon=horizon)
    print(f"minsum, horizon {horizon}: converged_at={tr.converged_at}")
