"""Command-line interface: ``ldpc-ml {decode,fer,guarantee,ts,rerun}``.

Exit codes: 0 success, 1 usage / input error, 2 decoding failure (decode),
3 failures found (guarantee). Every JSON document carries a ``manifest`` with
the resolved arguments; ``ldpc-ml rerun MANIFEST`` replays it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .code import CodeFormatError, file_digest, load_code, tanner_155
from .engine import decode
from .rules import DecoderConfig, DecoderKind, UnsupportedDegreeError
from .sim import BscChannel, BudgetExceededError, DEFAULT_BUDGET, default_workers, run_fer, run_guarantee
from .trapping import check_isolation, critical_number, decode_isolated, load_subgraph, parse_embedding

FER_COLUMNS = ["decoder", "alpha", "frames", "frame_errors", "undetected_errors", "fer", "ci_low",
               "ci_high", "avg_iters", "seed"]
FER_CSV_SCHEMA = "fer-csv/1"
BUILTIN_CODES = {"tanner155": tanner_155}

EXIT_OK, EXIT_USAGE, EXIT_DECODE_FAIL, EXIT_GUARANTEE_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load_code(name: str):
    if name in BUILTIN_CODES:
        return BUILTIN_CODES[name](), f"builtin:{name}"
    return load_code(name), file_digest(name)


def _config(kind: str, alpha: Optional[float], max_iters: int, trace: bool = False) -> DecoderConfig:
    kind = DecoderKind(kind)
    bp = None
    if kind is DecoderKind.BP:
        if alpha is None:
            raise UsageError("--alpha is required for the bp decoder")
        # alpha = 0 sends no errors; any small crossover gives the same decode
        bp = alpha if alpha > 0 else 1e-12
    return DecoderConfig(kind, max_iterations=max_iters, bp_crossover=bp, trace=trace)


def _manifest(command: str, argv: Sequence[str], args: argparse.Namespace, digest=None, **extra) -> dict:
    resolved = {k: v for k, v in vars(args).items() if k not in ("func",)}
    m = {
        "command": command,
        "argv": list(argv),
        "config": resolved,
        "code_digest": digest,
        "tool_version": __version__,
        "wall_clock_s": None,
        "workers": getattr(args, "workers", None),
    }
    m.update(extra)
    return m


def _emit(doc: dict, out: Optional[str], stdout) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_decode(args, argv, stdout) -> int:
    code, digest = _load_code(args.code)
    cfg = _config(args.decoder, args.alpha, args.max_iters, args.trace)
    r = [0] * code.n
    for i in args.errors:
        if not 0 <= i < code.n:
            raise UsageError(f"error index {i} outside 0..{code.n - 1}")
        r[i] = 1
    t0 = time.perf_counter()
    try:
        out = decode(cfg, code, r)
    except UnsupportedDegreeError as exc:
        raise UsageError(str(exc)) from None
    man = _manifest("decode", argv, args, digest)
    man["wall_clock_s"] = time.perf_counter() - t0
    _emit({"manifest": man, "result": out.to_dict()}, args.out, stdout)
    return EXIT_OK if out.success else EXIT_DECODE_FAIL


def fer_rows(estimates) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FER_COLUMNS)
    for e in estimates:
        w.writerow([e.decoder, repr(e.alpha), e.frames_run, e.frame_errors, e.undetected_errors,
                    repr(e.fer), repr(e.ci_low), repr(e.ci_high), repr(e.avg_iterations), e.seed])
    return buf.getvalue()


def cmd_fer(args, argv, stdout) -> int:
    code, digest = _load_code(args.code)
    estimates = []
    t0 = time.perf_counter()
    for kind in args.decoder.split(","):
        for alpha in args.alpha:
            cfg = _config(kind, alpha, args.max_iters)
            try:
                est = run_fer(cfg, code, BscChannel(alpha, args.seed, args.stream),
                              min_frame_errors=args.min_frame_errors, max_frames=args.max_frames,
                              workers=args.workers)
            except UnsupportedDegreeError as exc:
                raise UsageError(str(exc)) from None
            estimates.append(est)
    text = fer_rows(estimates)
    man = _manifest("fer", argv, args, digest, csv_schema=FER_CSV_SCHEMA, seeds=[args.seed],
                    prng=estimates[0].prng if estimates else None)
    man["wall_clock_s"] = time.perf_counter() - t0
    doc = {"manifest": man, "result": [e.to_dict() for e in estimates]}
    if args.out:
        Path(args.out).write_text(text)
        Path(args.out + ".json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(text)
    return EXIT_OK


def cmd_guarantee(args, argv, stdout) -> int:
    code, digest = _load_code(args.code)
    cfg = _config(args.decoder, args.alpha, args.max_iters)
    try:
        rep = run_guarantee(cfg, code, args.weight, mode=args.mode, samples=args.samples, seed=args.seed,
                            budget=args.budget, workers=args.workers, qc_circulant=args.qc_orbits)
    except (BudgetExceededError, UnsupportedDegreeError) as exc:
        raise UsageError(str(exc)) from None
    man = _manifest("guarantee", argv, args, digest)
    man["wall_clock_s"] = rep.elapsed
    _emit({"manifest": man, "result": rep.to_dict()}, args.out, stdout)
    return EXIT_OK if rep.failure_count == 0 else EXIT_GUARANTEE_FAIL


def cmd_ts(args, argv, stdout) -> int:
    sub = load_subgraph(args.subgraph)
    digest = file_digest(args.subgraph)
    result: dict = {"label": list(sub.label), "degree_one_checks": list(sub.degree_one_checks)}
    if args.check_isolation is not None:
        if not (args.host_code and args.embedding):
            raise UsageError("--check-isolation needs --host-code and --embedding")
        host, _ = _load_code(args.host_code)
        emb = parse_embedding(Path(args.embedding).read_bytes(), sub)
        try:
            result["isolation"] = check_isolation(host, sub, emb, args.check_isolation).to_dict()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.decoder:
        cfg = _config(args.decoder, None, args.max_iters)
        try:
            if args.critical:
                result["critical"] = critical_number(cfg, sub, k=args.iters, horizon=args.horizon).to_dict()
            else:
                tr = decode_isolated(cfg, sub, args.pattern, k=args.iters, horizon=args.horizon)
                result["trace"] = tr.to_dict()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    _emit({"manifest": _manifest("ts", argv, args, digest), "result": result}, args.out, stdout)
    return EXIT_OK


def cmd_rerun(args, argv, stdout) -> int:
    doc = json.loads(Path(args.manifest).read_text())
    man = doc.get("manifest", doc)
    return main(man["argv"], stdout=stdout)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ldpc-ml", description="Multilevel LDPC decoders on the binary symmetric channel.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    decoders = [k.value for k in DecoderKind]

    def common(sp, decoder_required=True):
        sp.add_argument("--code", required=True, help="alist / .qc file, or a builtin name (tanner155)")
        sp.add_argument("--decoder", required=decoder_required, choices=decoders)
        sp.add_argument("--max-iters", type=int, default=100)
        sp.add_argument("--alpha", type=float, default=None, help="BSC crossover (needed by bp)")
        sp.add_argument("--out", default=None)

    d = sub.add_parser("decode", help="decode one frame")
    common(d)
    d.add_argument("--errors", type=_int_list, required=True, help="comma-separated 0-based indices")
    d.add_argument("--trace", action="store_true")
    d.set_defaults(func=cmd_decode)

    f = sub.add_parser("fer", help="Monte Carlo frame error rate")
    f.add_argument("--code", required=True)
    f.add_argument("--decoder", required=True, help="one or more of " + ",".join(decoders))
    f.add_argument("--alpha", type=_float_list, required=True)
    f.add_argument("--min-frame-errors", type=int, default=100)
    f.add_argument("--max-frames", type=int, default=10**6)
    f.add_argument("--max-iters", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--stream", type=int, default=0)
    f.add_argument("--workers", type=int, default=None)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_fer)

    g = sub.add_parser("guarantee", help="weight-t guaranteed-correction sweep")
    common(g)
    g.add_argument("--weight", type=int, required=True)
    g.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    g.add_argument("--samples", type=int, default=10**6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    g.add_argument("--workers", type=int, default=None)
    g.add_argument("--qc-orbits", type=int, default=None, metavar="P",
                   help="exhaustive mode: decode one pattern per cyclic orbit of circulant size P")
    g.set_defaults(func=cmd_guarantee)

    t = sub.add_parser("ts", help="trapping-set analysis on an isolated subgraph")
    t.add_argument("--subgraph", required=True)
    t.add_argument("--decoder", choices=["7lt", "5nlt", "minsum"])
    t.add_argument("--pattern", type=_int_list, default=[])
    t.add_argument("--iters", type=int, default=None)
    t.add_argument("--horizon", type=int, default=None)
    t.add_argument("--max-iters", type=int, default=100)
    t.add_argument("--critical", action="store_true")
    t.add_argument("--host-code")
    t.add_argument("--embedding")
    t.add_argument("--check-isolation", type=int, default=None, metavar="K")
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_ts)

    r = sub.add_parser("rerun", help="replay a command from its JSON manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_rerun)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", 0) is None:
            args.workers = default_workers()
        return args.func(args, argv, stdout)
    except (UsageError, CodeFormatError, FileNotFoundError, ValueError) as exc:
        print(f"ldpc-ml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
