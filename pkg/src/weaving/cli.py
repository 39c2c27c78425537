"""Command-line front end.

Exit codes: 0 when every requested check passes, 1 on a failed check,
2 on bad usage (argparse errors and g < 2).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle, pipeline, render, twill
from .decomposition import braid_word


class UsageError(Exception):
    pass


def _genus(text: str) -> int:
    g = int(text)
    if g < 2:
        raise argparse.ArgumentTypeError(f"genus must satisfy g >= 2, got {g}")
    return g


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weaving",
                                description="Weaving mutations of semi-orthogonal decompositions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, report=True):
        sp.add_argument("--genus", "-g", type=_genus, required=True)
        sp.add_argument("--emit-log", metavar="PATH", help="write the event log as JSON lines")
        if report:
            sp.add_argument("--report", metavar="PATH", help="write a JSON report")

    run = sub.add_parser("run", help="run the stages up to --stage")
    common(run)
    run.add_argument("--stage", choices=(*pipeline.STAGES, "all"), default="all")
    run.add_argument("--mode", choices=(twill.THEOREM22, twill.COROLLARY28),
                     default=twill.THEOREM22)
    run.add_argument("--dual-sod", action="store_true",
                     help="also build the Ē form of the final decomposition")

    ver = sub.add_parser("verify", help="all closed-form diffs and certificate batches")
    common(ver)

    ren = sub.add_parser("render", help="draw one stage, or all, as SVG")
    common(ren, report=False)
    ren.add_argument("--stage", choices=(*pipeline.STAGES, "all"), default="all")
    ren.add_argument("--out", required=True, metavar="FILE.svg")
    ren.add_argument("--transform", choices=(render.FIGURE, render.RAW), default=render.FIGURE)
    ren.add_argument("--width", type=int)
    ren.add_argument("--height", type=int)
    ren.add_argument("--layout-json", metavar="PATH", help="dump the layout for testing")

    br = sub.add_parser("braid", help="write the braid word as JSON")
    common(br, report=False)
    br.add_argument("--out", required=True, metavar="FILE.json")

    orc = sub.add_parser("oracle", help="independent brute-force checks")
    orc_sub = orc.add_subparsers(dest="what", required=True)
    cr = orc_sub.add_parser("crossings", help="count twill crossings from trajectories")
    cr.add_argument("--genus", "-g", type=_genus, required=True)
    cr.add_argument("--compare", action="store_true",
                    help="also run the engine and compare braid-word lengths")
    return p


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_run(args) -> int:
    res = pipeline.run(args.genus, args.stage, args.mode, args.dual_sod)
    _write(args.emit_log, res.log.to_jsonl())
    rep = res.report()
    _write(args.report, json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    print(f"g={args.genus}: stages {', '.join(res.stages)}; {rep['strands']} blocks, "
          f"{rep['events']} events, braid length {rep['braid_length']}")
    if res.weave is not None:
        print(f"final decomposition of N: {rep['final_blocks']} blocks; "
              f"{res.weave.residual_count} residual blocks in A")
    if args.dual_sod:
        print(f"dual decomposition: {rep['dual_external_citations']} external citations")
    return 0


def _cmd_verify(args) -> int:
    try:
        checks = pipeline.verify(args.genus)
    except Exception as exc:  # report any failed stage as a verification failure
        report = {"genus": args.genus, "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        path = args.report or f"verify-g{args.genus}.json"
        _write(path, json.dumps(report, indent=2, ensure_ascii=False) + "\n")
        print(f"verification failed for g={args.genus}: {exc}\nreport: {path}",
              file=sys.stderr)
        return 1
    checks = {"genus": args.genus, "ok": True, **checks}
    _write(args.report, json.dumps(checks, indent=2, sort_keys=True) + "\n")
    if args.emit_log:
        _write(args.emit_log, pipeline.run(args.genus).log.to_jsonl())
    print(f"g={args.genus}: ok; {checks['strands']} strands, {checks['final_blocks']} final "
          f"blocks, {checks['residual']} residual, {checks['seconds']} s")
    return 0


def _cmd_render(args) -> int:
    res = pipeline.run(args.genus, args.stage)
    _write(args.emit_log, res.log.to_jsonl())
    layouts = render.stage_layouts(res.log, args.genus, args.stage, args.transform)
    svg = render.emit_svg(layouts, render.SvgOptions(width=args.width, height=args.height))
    Path(args.out).write_bytes(svg)
    if args.layout_json:
        _write(args.layout_json, render.layout_json(layouts) + "\n")
    print(f"wrote {args.out}: {render.crossing_total(svg)} crossings")
    return 0


def _cmd_braid(args) -> int:
    res = pipeline.run(args.genus)
    _write(args.emit_log, res.log.to_jsonl())
    word = braid_word(res.log)
    out = {"genus": args.genus, "length": len(word),
           "generators": [{"index": i, "over": o, "under": u} for i, o, u in word]}
    Path(args.out).write_text(json.dumps(out, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {args.out}: braid word of length {len(word)}")
    return 0


def _cmd_oracle(args) -> int:
    n = oracle.crossing_count(args.genus)
    print(n)
    if args.compare:
        engine = len(braid_word(twill.run(args.genus, twill.COROLLARY28).log))
        if engine != n:
            print(f"engine braid length {engine} != oracle {n}", file=sys.stderr)
            return 1
    return 0


_COMMANDS = {"run": _cmd_run, "verify": _cmd_verify, "render": _cmd_render,
             "braid": _cmd_braid, "oracle": _cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # any engine failure is a failed check
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
