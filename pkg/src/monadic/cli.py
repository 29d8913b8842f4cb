"""Command-line front end.

Exit status: 0 on success, 1 for a refuted / not-provable result under
``--strict``, 2 for usage and input errors, 3 when a combinatorial guard trips.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .formula import LanguageError, Logic, ParseError, bound_profile, parse_int, parse_mod, to_text
from .frame import (
    CLASS_IDS,
    CapExceeded,
    classify,
    count_frames,
    enumerate_frames,
    frame_to_json,
    read_frame,
    to_dot,
)
from .search import NOT_PROVABLE, decide, search, verify_translation_chain
from .semantics import Flavor, Model, frame_validity
from .translate import godel, split


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _parse_for(flavor: Flavor, text: str):
    return parse_int(text) if flavor is Flavor.INT else parse_mod(text)


def _parse_for_logic(logic: Logic, text: str):
    return parse_int(text) if logic.intuitionistic else parse_mod(text)


def _read_valuation(path: str) -> dict[str, list[str]]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not all(isinstance(v, list) for v in data.values()):
        raise UsageError(f"{path}: valuation must map variables to lists of worlds")
    return data


def cmd_translate(args, out) -> int:
    if args.mode == "split":
        result = split(parse_mod(args.formula))
    else:
        result = godel(parse_int(args.formula))
        if args.mode == "godel-split":
            result = split(result)
    text = to_text(result)
    out.write(_dump({"mode": args.mode, "input": args.formula, "output": text}) + "\n" if args.json else text + "\n")
    return 0


def cmd_check(args, out) -> int:
    F = read_frame(args.frame)
    flavor = Flavor.parse(args.flavor)
    f = _parse_for(flavor, args.formula)
    valuation = _read_valuation(args.valuation) if args.valuation else {}
    M = Model(F, valuation, flavor)
    if args.world is not None:
        value = M.holds(args.world, f)
        if args.json:
            out.write(_dump({"world": args.world, "formula": to_text(f), "value": value}) + "\n")
        else:
            out.write(("true" if value else "false") + "\n")
        return 1 if args.strict and not value else 0
    truth = F.ordered(M.truth_set(f))
    if args.json:
        out.write(_dump({"formula": to_text(f), "true_at": truth}) + "\n")
    else:
        out.write(" ".join(truth) + "\n")
    return 1 if args.strict and len(truth) < F.size else 0


def cmd_validity(args, out) -> int:
    F = read_frame(args.frame)
    flavor = Flavor.parse(args.flavor)
    f = _parse_for(flavor, args.formula)
    verdict = frame_validity(F, f, flavor)
    if args.json:
        out.write(_dump(verdict.as_dict(F)) + "\n")
    elif verdict.valid:
        out.write("valid\n")
    else:
        vals = ", ".join(f"{p}={{{', '.join(F.ordered(ws))}}}" for p, ws in verdict.valuation.items())
        out.write(f"refuted at {verdict.world} under {vals or 'the empty valuation'}\n")
    return 1 if args.strict and not verdict.valid else 0


def cmd_classify(args, out) -> int:
    F = read_frame(args.frame)
    out.write(_dump(classify(F).as_dict()) + "\n")
    return 0


def cmd_search(args, out) -> int:
    logic = Logic.parse(args.logic)
    f = _parse_for_logic(logic, args.formula)
    result = search(f, logic, args.max_worlds, threads=args.threads)
    cm = result.countermodel
    if args.emit_dot and cm is not None:
        with open(args.emit_dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(cm.frame, name="countermodel"))
    if args.json:
        out.write(_dump({
            "formula": to_text(f),
            "logic": logic.value,
            "max_worlds": args.max_worlds,
            "countermodel": cm.as_dict() if cm else None,
            "stats": result.stats.as_dict(),
        }) + "\n")
    elif cm is None:
        out.write(f"no countermodel with at most {args.max_worlds} worlds\n")
    else:
        vals = ", ".join(f"{p}={{{', '.join(cm.frame.ordered(ws))}}}" for p, ws in cm.valuation.items())
        out.write(f"countermodel at {cm.world} under {vals or 'the empty valuation'}\n")
        out.write(_dump(frame_to_json(cm.frame)) + "\n")
    return 1 if args.strict and cm is not None else 0


def cmd_decide(args, out) -> int:
    logic = Logic.parse(args.logic)
    f = _parse_for_logic(logic, args.formula)
    verdict = decide(f, logic, args.cap, threads=args.threads)
    if args.json:
        out.write(_dump(verdict.as_dict()) + "\n")
    else:
        out.write(f"{verdict.outcome} (searched up to {verdict.searched} worlds")
        out.write(f"; world cap {verdict.world_cap})\n" if verdict.world_cap is not None else "; no world cap)\n")
        if verdict.note:
            out.write(f"note: {verdict.note}\n")
        if verdict.countermodel is not None:
            out.write(_dump(verdict.countermodel.as_dict()) + "\n")
    return 1 if args.strict and verdict.outcome == NOT_PROVABLE else 0


def cmd_chain(args, out) -> int:
    report = verify_translation_chain(parse_int(args.formula), args.max_worlds, threads=args.threads)
    if args.json:
        out.write(_dump(report.as_dict()) + "\n")
    else:
        for name, status in zip(("M+IPC", "M+Grz", "MGL"), report.statuses):
            out.write(f"{name}: {'refutable' if status else 'no countermodel'}\n")
        out.write(f"agree: {report.agree}\n")
    return 1 if args.strict and not (report.agree and report.transfers_ok) else 0


def cmd_enumerate(args, out) -> int:
    if args.count:
        out.write(f"{count_frames(args.max_worlds, args.cls, args.dedup)}\n")
        return 0
    for F in enumerate_frames(args.max_worlds, args.cls, args.dedup):
        out.write(json.dumps(frame_to_json(F)) + "\n")
    return 0


def cmd_export_dot(args, out) -> int:
    text = to_dot(read_frame(args.frame))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_profile(args, out) -> int:
    logic = Logic.parse(args.logic)
    f = _parse_for_logic(logic, args.formula)
    out.write(_dump(bound_profile(f, logic).as_dict()) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    logics = ", ".join(l.value for l in Logic)
    parser = argparse.ArgumentParser(prog="monadic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate", help="Gödel or splitting translation")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--godel", dest="mode", action="store_const", const="godel")
    mode.add_argument("--split", dest="mode", action="store_const", const="split")
    mode.add_argument("--godel-split", dest="mode", action="store_const", const="godel-split")
    p.add_argument("formula")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_translate)

    def frame_formula(p):
        p.add_argument("--frame", required=True)
        p.add_argument("--formula", required=True)
        p.add_argument("--flavor", required=True, choices=("int", "mod"))
        p.add_argument("--json", action="store_true")
        p.add_argument("--strict", action="store_true")

    p = sub.add_parser("check", help="truth of a formula in a model")
    frame_formula(p)
    p.add_argument("--valuation")
    p.add_argument("--world")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("validity", help="validity of a formula on a frame")
    frame_formula(p)
    p.set_defaults(func=cmd_validity)

    p = sub.add_parser("classify", help="frame class report (JSON)")
    p.add_argument("--frame", required=True)
    p.set_defaults(func=cmd_classify)

    def threads(p):
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("search", help="countermodel search")
    p.add_argument("--formula", required=True)
    p.add_argument("--logic", required=True, help=logics)
    p.add_argument("--max-worlds", type=int, required=True)
    p.add_argument("--emit-dot")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    threads(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("decide", help="bounded decision procedure")
    p.add_argument("--formula", required=True)
    p.add_argument("--logic", required=True, help=logics)
    p.add_argument("--cap", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    threads(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("chain", help="compare M+IPC / M+Grz / MGL refutability")
    p.add_argument("--formula", required=True)
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    threads(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("enumerate", help="list frames of a class as JSON lines")
    p.add_argument("--max-worlds", type=int, required=True)
    p.add_argument("--class", dest="cls", default="any", help=", ".join(CLASS_IDS))
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("export-dot", help="Graphviz rendering of a frame")
    p.add_argument("--frame", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("profile", help="subformula counts and search caps")
    p.add_argument("--formula", required=True)
    p.add_argument("--logic", required=True, help=logics)
    p.set_defaults(func=cmd_profile)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        err.write("error: --threads must be at least 1\n")
        return 2
    try:
        return args.func(args, out)
    except CapExceeded as exc:
        frontier = f" (largest feasible size: {exc.frontier})" if exc.frontier is not None else ""
        err.write(f"error: {exc}{frontier}\n")
        return 3
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (OSError, json.JSONDecodeError, UsageError, LanguageError, ValueError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
