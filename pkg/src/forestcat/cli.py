"""Command-line front end.

Subcommands: enumerate, check-segal, envelope, verify, export, report.
Exit codes: 0 success, 1 a check failed (witness printed), 2 bad
configuration, malformed input or bound violations.

Outputs in json/dot format are byte-stable for a fixed configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import suites as suite_mod
from .forests import (
    Forest,
    automorphism_count,
    corolla,
    corolla_count,
    enumerate_trees,
    eta,
    forest_to_dot,
)
from .segal import (
    FIXTURES,
    OperadError,
    OperadSpec,
    Window,
    WindowError,
    check_segal,
    nerve_of_operad,
)
from .envelope import EnvelopeError, env_corolla, envelope_slice, envelope_value


def _emit(args, payload, text_lines):
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True)
    else:
        out = "\n".join(text_lines)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _config_echo(args) -> dict:
    keys = ("pattern", "height", "min_height", "width", "cap", "strict",
            "exclude_empty", "operad", "object", "suite", "seed", "jobs", "format")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _load_operad(args) -> OperadSpec:
    name = args.operad
    if name in FIXTURES:
        width_need = max(getattr(args, "width", 3) or 3, 3)
        cap = getattr(args, "cap", 3) or 3
        arity = max(width_need * cap, 4)
        if name == "com":
            return FIXTURES[name](arity)
        if name == "free-monoid":
            return FIXTURES[name](max(cap * 2, 4), min(arity, 6))
        return FIXTURES[name](min(arity, 6))
    try:
        with open(name) as fh:
            return OperadSpec.from_json(json.load(fh))
    except FileNotFoundError:
        raise SystemExit2(f"no such operad fixture or file: {name}")
    except (OperadError, KeyError, ValueError) as exc:
        raise SystemExit2(f"malformed operad: {exc}")


class SystemExit2(SystemExit):
    def __init__(self, message):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _parse_object(selector: str) -> Forest:
    if selector == "eta":
        return eta()
    if selector.startswith("c:"):
        return corolla(int(selector[2:]))
    if selector.startswith("@"):
        with open(selector[1:]) as fh:
            return Forest.from_json(json.load(fh))
    raise SystemExit2(f"unknown object selector: {selector!r} (use eta, c:N, @file.json)")


# -- subcommands -------------------------------------------------------------


def cmd_enumerate(args) -> int:
    if args.height > 6 or args.width > 6:
        raise SystemExit2("bounds exceed the supported enumeration window")
    min_height = args.min_height if args.min_height is not None else args.height
    if min_height > args.height:
        raise SystemExit2("--min-height exceeds --height")
    trees = []
    for h in range(min_height, args.height + 1):
        trees.extend(enumerate_trees(args.pattern, args.height, args.width, exact_height=h))
    payload = {
        "config": _config_echo(args),
        "trees": [
            {
                "forest": t.to_json(),
                "vertices": corolla_count(t),
                "automorphisms": automorphism_count(t),
            }
            for t in trees
        ],
    }
    lines = [f"{len(trees)} tree(s) with height in [{min_height}, {args.height}], width <= {args.width}:"]
    for t in trees:
        lines.append(
            f"  widths={list(t.widths)} vertices={corolla_count(t)} |Aut|={automorphism_count(t)}"
        )
    _emit(args, payload, lines)
    return 0


def cmd_check_segal(args) -> int:
    if args.presheaf:
        from .segal import tabulated_from_json

        try:
            with open(args.presheaf) as fh:
                X = tabulated_from_json(json.load(fh))
        except (KeyError, ValueError) as exc:
            raise SystemExit2(f"malformed presheaf: {exc}")
        report = check_segal(X)
    else:
        if not args.operad:
            raise SystemExit2("one of --operad or --presheaf is required")
        spec = _load_operad(args)
        window = Window(args.height, args.width, max_total=args.total_size)
        if len(window) == 0:
            _emit(args, {"config": _config_echo(args), "vacuous": True},
                  ["warning: empty window, checks are vacuous"])
            return 0
        try:
            X = nerve_of_operad(spec, window)
            report = check_segal(X)
        except (OperadError, WindowError) as exc:
            raise SystemExit2(str(exc))
    payload = {
        "config": _config_echo(args),
        "level": {"ok": report.level.ok, "checked": report.level.checked,
                  "witness": repr(report.level.witness) if not report.level.ok else None},
        "root": {"ok": report.root.ok, "checked": report.root.checked,
                 "witness": repr(report.root.witness) if not report.root.ok else None},
        "shrub": {"ok": report.shrub.ok, "checked": report.shrub.checked,
                  "witness": repr(report.shrub.witness) if not report.shrub.ok else None},
        "note": report.window_note,
    }
    lines = [
        f"level decomposition: {'pass' if report.level.ok else 'FAIL'} ({report.level.checked} checked)",
        f"root decomposition:  {'pass' if report.root.ok else 'FAIL'} ({report.root.checked} checked)",
        f"shrub decomposition: {'pass' if report.shrub.ok else 'FAIL'} ({report.shrub.checked} checked)",
    ]
    if not report.all_pass:
        for kind, res in (("level", report.level), ("root", report.root), ("shrub", report.shrub)):
            if not res.ok:
                lines.append(f"witness ({kind}): {res.witness!r}")
    _emit(args, payload, lines)
    return 0 if report.all_pass else 1


def cmd_envelope(args) -> int:
    spec = _load_operad(args)
    T = _parse_object(args.object)
    width_need = max(max(T.widths) * args.cap, max(T.widths), 3)
    window = Window(max(T.length, 1), width_need)
    try:
        X = nerve_of_operad(spec, window)
        ev = envelope_value(X, T, args.cap, strict=args.strict,
                            exclude_empty=args.exclude_empty, compute_plain=True)
    except (OperadError, WindowError, EnvelopeError) as exc:
        raise SystemExit2(str(exc))
    payload = {"config": _config_echo(args), "envelope": ev.to_json()}
    lines = [
        f"envelope at {args.object}, cap {args.cap} "
        f"(strict={args.strict}, exclude_empty={args.exclude_empty}):",
        f"  classes: {ev.class_count} (fully glued: {ev.plain_class_count})",
        f"  stabilized: {ev.stabilized}   fibre decomposition consistent: {ev.inner_limit_ok}",
    ]
    if T.length == 1 and T.single_rooted:
        cc = env_corolla(X, T.widths[0], args.cap, strict=args.strict,
                         exclude_empty=args.exclude_empty)
        hit, total = cc.default_coverage()
        payload["corolla_coproduct"] = {
            "entries": len(cc.entries),
            "surjective_onto_plain": cc.surjective_onto_plain(),
            "default_coverage": [hit, total],
        }
        lines.append(
            f"  partitioned-family coproduct: {len(cc.entries)} entries, "
            f"onto fully-glued classes: {cc.surjective_onto_plain()}, "
            f"covers {hit}/{total} stratified classes"
        )
    _emit(args, payload, lines)
    return 0


def cmd_verify(args) -> int:
    if args.suite not in suite_mod.SUITES:
        raise SystemExit2(f"unknown suite {args.suite!r}; choose from {sorted(suite_mod.SUITES)}")
    ok, details = suite_mod.SUITES[args.suite]()
    payload = {"config": _config_echo(args), "suite": args.suite, "ok": ok, "details": repr(details)}
    lines = [f"suite {args.suite}: {'pass' if ok else 'FAIL'}", f"details: {details!r}"]
    _emit(args, payload, lines)
    return 0 if ok else 1


def cmd_export(args) -> int:
    what = args.what
    try:
        if what.startswith("slice:"):
            selector = what[len("slice:"):]
            T = _parse_object(selector)
            cat = envelope_slice(T, args.cap, strict=args.strict,
                                 exclude_empty=args.exclude_empty)
            out = cat.to_dot(name="slice")
        else:
            T = _parse_object(what)
            out = forest_to_dot(T)
    except EnvelopeError as exc:
        raise SystemExit2(str(exc))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    envelope_data = None
    if args.operad:
        spec = _load_operad(args)
        rows, series = [], {}
        for selector in ("eta", "c:1", "c:2"):
            T = _parse_object(selector)
            window = Window(max(T.length, 1), max(max(T.widths) * args.cap, 3))
            X = nerve_of_operad(spec, window)
            points = []
            for cap in range(1, args.cap + 1):
                ev = envelope_value(X, T, cap, strict=args.strict,
                                    exclude_empty=args.exclude_empty,
                                    compute_plain=True, check_inner=False)
                rows.append([selector, cap, args.strict, args.exclude_empty,
                             ev.class_count, ev.plain_class_count,
                             ev.stabilized, ev.inner_limit_ok])
                points.append((cap, ev.class_count))
            series[selector] = points
        envelope_data = (rows, series)
    paths = write_report(args.out, args.pattern, args.height, args.width, envelope_data)
    for p in paths:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forestcat",
        description="level forests, Segal checks, and monoidal envelopes on finite windows",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_bounds=True):
        p.add_argument("--format", choices=("text", "json", "dot"), default="text")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=20240817)
        p.add_argument("--jobs", type=int, default=1,
                       help="accepted for compatibility; execution is single-threaded")
        if with_bounds:
            p.add_argument("--height", type=int, default=2)
            p.add_argument("--width", type=int, default=3)
            p.add_argument("--cap", type=int, default=3)
            p.add_argument("--total-size", type=int, default=None, dest="total_size")

    p = sub.add_parser("enumerate", help="isomorphism classes of level trees")
    common(p)
    p.add_argument("--pattern", choices=("gamma", "terminal"), default="gamma")
    p.add_argument("--min-height", type=int, default=None, dest="min_height",
                   help="defaults to --height (exact-height listing)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check-segal", help="Segal decompositions of an operad nerve")
    common(p)
    p.add_argument("--pattern", choices=("gamma",), default="gamma")
    p.add_argument("--operad", default=None,
                   help="fixture name (com, ass, free-binary, two-color, free-monoid) or JSON file")
    p.add_argument("--presheaf", default=None,
                   help="tabulated presheaf JSON to check instead of an operad nerve")
    p.set_defaults(func=cmd_check_segal)

    p = sub.add_parser("envelope", help="envelope classes at an object")
    common(p)
    p.add_argument("--pattern", choices=("gamma",), default="gamma")
    p.add_argument("--operad", required=True)
    p.add_argument("--object", required=True, help="eta, c:N, or @forest.json")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--exclude-empty", action=argparse.BooleanOptionalAction,
                   default=True, dest="exclude_empty")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("verify", help="run a named invariant suite")
    common(p)
    p.add_argument("--pattern", choices=("gamma", "terminal"), default="gamma")
    p.add_argument("--suite", required=True,
                   choices=tuple(sorted(suite_mod.SUITES)))
    p.add_argument("--size", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="DOT export of a tree or envelope slice")
    common(p)
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--exclude-empty", action=argparse.BooleanOptionalAction,
                   default=True, dest="exclude_empty")
    p.add_argument("what", help="eta, c:N, @forest.json, or slice:SELECTOR")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("report", help="CSV tables and PNG figures for a window")
    common(p)
    p.add_argument("--pattern", choices=("gamma", "terminal"), default="gamma")
    p.add_argument("--operad", default=None)
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--exclude-empty", action=argparse.BooleanOptionalAction,
                   default=True, dest="exclude_empty")
    p.set_defaults(func=cmd_report, out="report")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "height", 1) < 0 or getattr(args, "width", 1) < 0 \
            or getattr(args, "cap", 1) < 0:
        print("error: bounds must be nonnegative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except SystemExit2 as exc:
        return exc.code
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
