"""Frame error rate of all five decoders on the Tanner code at one crossover.

Each point runs until 50 frame errors (or 2 million frames). Numbers are
reproducible: the same seed gives the same table for any worker count.
"""

import sys

from ldpc_multilevel import BscChannel, DecoderConfig, run_fer, tanner_155

alpha = float(sys.argv[1]) if len(sys.argv) > 1 else 0.03
code = tanner_155()
print(f"alpha={alpha}")
print(f"{'decoder':>10} {'frames':>9} {'errors':>6} {'fer':>10}  95% interval          avg iters  lightest failure")
for kind in ("gallager-b", "minsum", "bp", "7lt", "5nlt"):
    cfg = DecoderConfig(kind, bp_crossover=alpha if kind == "bp" else None)
    est = run_fer(cfg, code, BscChannel(alpha, seed=2024), min_frame_errors=50, max_frames=2_000_000)
    print(f"{kind:>10} {est.frames_run:>9} {est.frame_errors:>6} {est.fer:>10.3e}  "
          f"[{est.ci_low:.2e}, {est.ci_high:.2e}]  {est.avg_iterations:>9.2f}  {est.min_error_weight_failed}")
