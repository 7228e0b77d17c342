"""Command-line driver: ``rsperiodic <command> FILE ...``.

FILE is a substitution file, or ``@name`` for a built-in catalog entry.
Exit codes: 0 success, 1 the analysis rejected its input, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from typing import Any, Callable

from . import disjoint, language, periodic, spectral
from .core import RandomSubstitution, Word
from .specfile import CATALOG, SpecError, catalog, parse_spec

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2

REJECTIONS = (spectral.NotCompatibleError, spectral.NotPrimitiveError,
              periodic.NotDisjointError, disjoint.ProcedureInapplicable)


class UsageError(Exception):
    pass


def load(source: str) -> RandomSubstitution:
    if source.startswith("@"):
        try:
            return catalog(source[1:])
        except KeyError as e:
            raise UsageError(e.args[0]) from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sub = parse_spec(source)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return sub


def _word(sub: RandomSubstitution, text: str) -> Word:
    try:
        w = sub.alphabet.word(text)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not w:
        raise UsageError("word must be nonempty")
    return w


# -- payload builders ------------------------------------------------------------

def _perron(pd: spectral.PerronData) -> dict:
    return {
        "matrix": [list(r) for r in pd.matrix],
        "lambda_approx": pd.lambda_approx,
        "lambda_exact": pd.lambda_exact,
        "r_hat": list(pd.r_hat) if pd.r_hat else None,
        "virtual_period": pd.virtual_period,
        "r_normalized": [str(x) for x in pd.r_normalized] if pd.r_normalized else None,
    }


def _witness(fmt, w: disjoint.Witness | None):
    return None if w is None else {"u": fmt(w.u), "v": fmt(w.v), "w": fmt(w.w)}


def _disjoint(sub, cache) -> dict:
    try:
        rep = disjoint.has_disjoint_images(sub, cache=cache)
    except disjoint.ProcedureInapplicable as e:
        return {"decided": False, "reason": str(e)}
    fmt = sub.alphabet.format
    out = {"decided": True, "disjoint": rep.disjoint, "method": rep.method,
           "witness": _witness(fmt, rep.witness)}
    if rep.certificate:
        out["certificate"] = [
            {"quadruple": {"a": sub.alphabet.symbols[q.a], "b": sub.alphabet.symbols[q.b],
                           "wa": fmt(q.wa), "wb": fmt(q.wb)},
             "states": [[fmt(r), side] for r, side in states]}
            for q, states in rep.certificate
        ]
    return out


def _existence(sub, depth, cache) -> dict:
    rep = periodic.emptiness_check(sub, depth, cache)
    fmt = sub.alphabet.format
    return {
        "lambda_integer": rep.lambda_integer,
        "virtual_period": rep.virtual_period,
        "emptiness": "proven_empty" if rep.proven_empty else "inconclusive",
        "reason": rep.reason,
        "words": [fmt(w) for w in rep.words],
        "depth": rep.depth,
        "witness": fmt(rep.witness) if rep.witness is not None else None,
    }


def cmd_analyze(sub, args, cache):
    comp = spectral.is_compatible(sub)
    fmt = sub.alphabet.format
    res: dict[str, Any] = {
        "alphabet": list(sub.alphabet.symbols),
        "compatible": comp.ok,
    }
    if not comp:
        res["incompatible_images"] = {"letter": sub.alphabet.symbols[comp.letter],
                                      "first": fmt(comp.first), "second": fmt(comp.second)}
        return res, EXIT_REJECTED
    res["matrix"] = [list(r) for r in spectral.substitution_matrix(sub)]
    res["primitivity_exponent"] = spectral.primitivity_exponent(sub)
    res["primitive"] = res["primitivity_exponent"] is not None
    res["constant_length"] = spectral.constant_length(sub)
    if not res["primitive"]:
        return res, EXIT_REJECTED
    res["perron"] = _perron(spectral.perron_analysis(sub))
    res["disjoint_images"] = _disjoint(sub, cache)
    res["existence"] = _existence(sub, args.depth, cache)
    return res, EXIT_OK


def cmd_legal(sub, args, cache):
    w = _word(sub, args.word)
    return {"word": sub.alphabet.format(w), "legal": language.is_legal(sub, w, cache)}, EXIT_OK


def cmd_decompose(sub, args, cache):
    w = _word(sub, args.word)
    fmt = sub.alphabet.format
    decs = language.decompose(sub, w, cache)
    return {
        "word": fmt(w),
        "decompositions": [
            {"preimage": fmt(d.preimage), "cut_points": list(d.cut_points),
             "realisations": [fmt(x) for x in d.realisations]}
            for d in decs
        ],
        "unique": len(decs) == 1,
    }, EXIT_OK


def cmd_disjoint(sub, args, cache):
    spectral.require_compatible(sub)
    res = {"disjoint_images": _disjoint(sub, cache)}
    if args.inflation_depth:
        rep = disjoint.has_disjoint_inflation_images(sub, args.inflation_depth)
        res["inflation_images"] = {
            "m_max": rep.m_max,
            "violated": rep.violated,
            "letter": sub.alphabet.symbols[rep.letter] if rep.letter is not None else None,
            "m": rep.m,
            "witness": _witness(sub.alphabet.format, rep.witness),
        }
    if not res["disjoint_images"]["decided"]:
        return res, EXIT_REJECTED
    return res, EXIT_OK


def cmd_exists(sub, args, cache):
    return _existence(sub, args.depth, cache), EXIT_OK


def cmd_periodic_block(sub, args, cache):
    w = _word(sub, args.word)
    fmt = sub.alphabet.format
    v = periodic.is_periodic_block(sub, w, cache)
    return {
        "word": fmt(w),
        "primitive_root": fmt(v.root),
        "decision": "yes" if v.is_block else "no",
        "certificate": [{"word": fmt(s.word), "i": s.i, "j": s.j, "preimage": fmt(s.preimage)}
                        for s in v.certificate],
        "trace": [{"word": fmt(t.word), "failure": t.failure, "detail": t.detail}
                  for t in v.trace],
    }, EXIT_OK


def cmd_enumerate(sub, args, cache):
    if args.period < 1:
        raise UsageError("--period must be positive")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    rep = periodic.enumerate_blocks(sub, args.period, jobs=args.jobs, cache=cache,
                                    method=args.method)
    res: dict[str, Any] = {
        "period": rep.period,
        "per_count": rep.per_count,
        "per_counts": {str(d): c for d, c in rep.per_counts.items()},
        "orbit_counts": {str(d): c for d, c in rep.orbit_counts.items()},
    }
    if not args.count_only:
        res["blocks"] = [sub.alphabet.format(w) for w in rep.blocks]
    return res, EXIT_OK


COMMANDS: dict[str, Callable] = {
    "analyze": cmd_analyze,
    "legal": cmd_legal,
    "decompose": cmd_decompose,
    "disjoint": cmd_disjoint,
    "exists": cmd_exists,
    "periodic-block": cmd_periodic_block,
    "enumerate": cmd_enumerate,
}


# -- output --------------------------------------------------------------------------

def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def loads_report(text: str) -> dict:
    return json.loads(text)


def _text_lines(value, indent=0):
    pad = "  " * indent
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar(v)}"
    elif isinstance(value, list):
        if all(not isinstance(x, (dict, list)) for x in value):
            yield pad + " ".join(_scalar(x) for x in value)
        else:
            for x in value:
                if isinstance(x, dict):
                    lines = list(_text_lines(x, indent + 1))
                    yield pad + "- " + lines[0].lstrip()
                    yield from lines[1:]
                else:
                    yield pad + "- " + " ".join(_scalar(y) for y in x)
    else:
        yield pad + _scalar(value)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return "[]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def format_text(report: dict) -> str:
    head = f"{report['command']}  [{report['fingerprint']}]"
    return "\n".join([head, *_text_lines(report["result"])]) + "\n"


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="substitution file, or @name for a catalog entry")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timing", action="store_true",
                        help="record elapsed_ms (makes output run-dependent)")
    common.add_argument("--cache-dir", help="directory for persisted language slices")

    parser = argparse.ArgumentParser(
        prog="rsperiodic",
        description="Analyse random substitutions and their periodic points.",
        epilog="catalog entries: " + ", ".join("@" + k for k in CATALOG),
    )
    sp = parser.add_subparsers(dest="command", required=True)
    p = sp.add_parser("analyze", parents=[common], help="compatibility, PF data, disjoint images")
    p.add_argument("--depth", type=int, default=16, help="word length N for the emptiness check")
    for name, helptext in (("legal", "is WORD legal"),
                           ("decompose", "split WORD into inflation words"),
                           ("periodic-block", "is WORD a periodic block")):
        p = sp.add_parser(name, parents=[common], help=helptext)
        p.add_argument("word")
    p = sp.add_parser("disjoint", parents=[common], help="disjoint images decision")
    p.add_argument("--inflation-depth", type=int, default=0, metavar="M",
                   help="also search inflation images up to power M")
    p = sp.add_parser("exists", parents=[common], help="criteria for periodic points")
    p.add_argument("--depth", type=int, required=True, metavar="N")
    p = sp.add_parser("enumerate", parents=[common], help="all periodic blocks of a period")
    p.add_argument("--period", type=int, required=True, metavar="P")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--method", choices=("auto", "general"), default="auto")
    return parser


def _params(args) -> dict:
    skip = {"command", "file", "format", "timing", "cache_dir", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        sub = load(args.file)
        cache = language.LanguageCache(args.cache_dir) if args.cache_dir else None
        start = time.perf_counter()
        try:
            result, code = COMMANDS[args.command](sub, args, cache)
        except REJECTIONS as e:
            result, code = {"error": {"type": type(e).__name__, "message": str(e)}}, EXIT_REJECTED
        elapsed = round((time.perf_counter() - start) * 1000, 3)
    except (SpecError, UsageError) as e:
        print(f"rsperiodic: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": args.command,
        "fingerprint": language.fingerprint(sub),
        "params": _params(args),
        "result": result,
        "elapsed_ms": elapsed if args.timing else None,
    }
    out.write(dumps_report(report) if args.format == "json" else format_text(report))
    return code


def main() -> None:
    sys.exit(run())
