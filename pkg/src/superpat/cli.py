"""
Command-line front end.

Exit codes: 0 success / predicate true, 1 predicate false, 2 usage or parse
error, 3 node budget exceeded, 4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from ._jit import backend_name
from .containment import (
    CapError,
    is_surjective,
    missing_pattern,
    missing_permutation,
)
from .patterns import PatternError, Word, bounds_report, encode, enumerate_pa
from .search import DEFAULT_BUDGET, SearchProblem, search_min
from .stochastic import (
    EXACT_X_CAP,
    GENERATOR,
    StreamConfig,
    closed_forms,
    concentration_check,
    exact_expectation,
    simulate,
    write_trial_dump,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET, EXIT_CAP = 0, 1, 2, 3, 4
CACHED_COMMANDS = {"search", "simulate", "exact", "concentration"}

log = logging.getLogger("superpat")


def fmt_number(x) -> str:
    """Exact value plus a 12-significant-digit decimal."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator} ({float(x):.12g})"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _json_number(x):
    if isinstance(x, Fraction):
        return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(f"{float(x):.12g}")}
    return x


def render(rows: list[tuple[str, object]], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: _json_number(v) for k, v in rows}, indent=2) + "\n"
    if fmt == "csv":
        values = [f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else fmt_number(v)
                  for _, v in rows]
        return ",".join(k for k, _ in rows) + "\n" + ",".join(values) + "\n"
    return "".join(f"{k}={fmt_number(v)}\n" for k, v in rows)


# ---------------------------------------------------------------------------
# subcommands: each returns (output text, exit code)
# ---------------------------------------------------------------------------


def cmd_enumerate(args):
    patterns = sorted(enumerate_pa(args.k, args.d))
    texts = [encode(p, args.d) for p in patterns]
    if args.format == "json":
        out = json.dumps({"k": args.k, "d": args.d, "count": len(texts), "patterns": texts},
                         indent=2) + "\n"
    else:
        out = "".join(t + "\n" for t in texts)
    return out, EXIT_OK


def cmd_check(args):
    word = Word.parse(args.word, args.d)
    d = word.d
    k = args.k
    evidence = None
    if args.surjective and not is_surjective(word, d):
        missing = sorted(set(range(1, d + 1)) - set(word))
        evidence = f"letter {missing[0]}"
    elif args.mode == "complete" or (args.mode == "superpattern" and d == k):
        if d != k:
            raise PatternError("complete mode needs d == k")
        p = missing_permutation(word, k)
        evidence = None if p is None else encode(p, d)
    else:
        p = missing_pattern(word, k, d, require_regular=args.mode == "regular")
        evidence = None if p is None else encode(p, d)
    ok = evidence is None
    rows = [("word", str(word)), ("k", k), ("d", d), ("mode", args.mode),
            ("surjective", str(args.surjective).lower()), ("result", str(ok).lower())]
    if not ok:
        rows.append(("missing", evidence))
    return render(rows, args.format), EXIT_OK if ok else EXIT_FALSE


def cmd_search(args):
    problem = SearchProblem(args.k, args.d, args.surjective, args.max_len, args.threads,
                            budget=args.budget)
    res = search_min(problem)
    log.info("search wall time %.3fs", res.wall_time)
    if args.certificate and res.certificates:
        Path(args.certificate).write_text(
            "\n".join(c.to_text() for c in res.certificates))
    rows = [
        ("k", args.k), ("d", args.d), ("surjective", str(args.surjective).lower()),
        ("min_length", res.min_length if res.min_length is not None else "none"),
        ("witness", str(res.witness) if res.witness is not None else "none"),
        ("exhaustive", str(res.exhaustive).lower()),
        ("refuted", " ".join(map(str, res.refuted)) or "none"),
        ("nodes", res.nodes_visited), ("pruned", res.pruned),
    ]
    if res.budget_exceeded:
        rows.append(("status", "budget_exceeded"))
        return render(rows, args.format), EXIT_BUDGET
    if res.min_length is None:
        rows.append(("status", "max_len_reached"))
        return render(rows, args.format), EXIT_FALSE
    return render(rows, args.format), EXIT_OK


def cmd_simulate(args):
    config = StreamConfig(args.k, args.seed, args.trials)
    sim = simulate(config, threads=args.threads)
    if args.dump:
        buf = io.StringIO()
        write_trial_dump(sim, buf)
        _write_with_manifest(Path(args.dump), buf.getvalue(), "simulate-dump", vars(args))
    stats = sim.stats
    if args.format == "csv":
        lines = ["k,trials,seed,process,mean,variance,ci_half_width"]
        for name, s in stats.items():
            lines.append(f"{args.k},{s.trials},{args.seed},{name},{s.mean!r},{s.variance!r},"
                         f"{s.ci_half_width!r}")
        return "\n".join(lines) + "\n", EXIT_OK
    if args.format == "json":
        doc = {"k": args.k, "trials": args.trials, "seed": args.seed, "generator": GENERATOR,
               "confidence": sim.confidence,
               "processes": {n: {"mean": s.mean, "variance": s.variance,
                                 "ci_half_width": s.ci_half_width} for n, s in stats.items()}}
        return json.dumps(doc, indent=2) + "\n", EXIT_OK
    rows = [("k", args.k), ("trials", args.trials), ("seed", args.seed), ("generator", GENERATOR)]
    for name, s in stats.items():
        rows += [(f"mean_{name}", s.mean), (f"variance_{name}", s.variance),
                 (f"ci_half_width_{name}", s.ci_half_width)]
    return render(rows, "text"), EXIT_OK


def cmd_exact(args):
    cf = closed_forms(args.k)
    rows = [("k", args.k), ("E_Y", cf.E_Y), ("Var_Y", cf.Var_Y), ("E_Z", cf.E_Z),
            ("thm2_upper_leading", cf.thm2_upper_leading),
            ("thm3_lower_leading", cf.thm3_lower_leading)]
    processes = args.process or (["X", "Z"] if args.k <= EXACT_X_CAP else ["Z"])
    for proc in processes:
        try:
            rows.append((f"chain_E_{proc}", exact_expectation(args.k, proc)))
        except PatternError as exc:
            raise CapError(str(exc)) from None
    return render(rows, args.format), EXIT_OK


def cmd_bounds(args):
    b = bounds_report(args.k)
    rows = [("k", b.k), ("prop1_lower", b.prop1_lower), ("newey_conjecture", b.newey_conjecture),
            ("rado_upper", b.rado_upper), ("burstein_upper", b.burstein_upper)]
    return render(rows, args.format), EXIT_OK


def cmd_concentration(args):
    rep = concentration_check(args.k, args.omega, args.trials, args.seed, args.threads)
    rows = [("k", rep.k), ("omega", rep.omega), ("trials", rep.trials), ("seed", args.seed),
            ("lower", rep.lower), ("upper", rep.upper), ("inside", rep.inside),
            ("fraction", rep.fraction)]
    return render(rows, args.format), EXIT_OK


# ---------------------------------------------------------------------------
# manifests and cache
# ---------------------------------------------------------------------------


def _digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def _params(subcommand, args) -> dict:
    skip = {"func", "out", "no_cache", "cache_dir", "verbose", "dump", "certificate"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_with_manifest(path: Path, text: str, subcommand: str, params: dict, exit_code=0):
    _atomic_write(path, text)
    manifest = {
        "subcommand": subcommand,
        "parameters": {k: v for k, v in params.items() if k != "func"},
        "code_version": __version__,
        "backend": backend_name(),
        "generator": GENERATOR,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "output": path.name,
        "output_digest": _digest(text),
        "exit_code": exit_code,
    }
    _atomic_write(manifest_path(path), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def verify_manifest(path) -> bool:
    """True iff the manifest next to ``path`` matches the file's content."""
    path = Path(path)
    manifest = json.loads(manifest_path(path).read_text())
    return manifest["output_digest"] == _digest(path.read_text())


def cache_dir(args) -> Path:
    if args.cache_dir:
        return Path(args.cache_dir)
    env = os.environ.get("SUPERPAT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "superpat"


def cache_key(subcommand: str, params: dict) -> str:
    blob = json.dumps({"subcommand": subcommand, "parameters": params, "version": __version__},
                      sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def _run_cached(args):
    name = args.command
    params = _params(name, args)
    entry = None
    if name in CACHED_COMMANDS and not args.no_cache and not getattr(args, "dump", None):
        entry = cache_dir(args) / f"{name}-{cache_key(name, params)}.out"
        if entry.exists() and manifest_path(entry).exists() and verify_manifest(entry):
            code = json.loads(manifest_path(entry).read_text()).get("exit_code", 0)
            log.info("cache hit %s", entry)
            return entry.read_text(), code
    text, code = args.func(args)
    if entry is not None and code in (EXIT_OK, EXIT_FALSE):
        _write_with_manifest(entry, text, name, params, code)
    return text, code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--out", metavar="PATH", help="also write output (and a manifest) here")
    common.add_argument("--no-cache", action="store_true", help="bypass the results cache")
    common.add_argument("--cache-dir", metavar="DIR")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="superpat", description="Superpatterns for preferential arrangements.")
    parser.add_argument("--version", action="version", version=f"superpat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list preferential arrangements")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", type=_positive, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", parents=[common], help="test a word")
    p.add_argument("word")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", type=_positive)
    p.add_argument("--mode", choices=["superpattern", "complete", "regular"],
                   default="superpattern")
    p.add_argument("--surjective", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("search", parents=[common], help="shortest superpattern search")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--surjective", action="store_true")
    p.add_argument("--max-len", type=_positive)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--certificate", metavar="PATH", help="write refutation certificates here")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo waiting times")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--dump", metavar="PATH", help="per-trial CSV dump")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exact", parents=[common], help="closed forms and exact chains")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--process", nargs="+", choices=["X", "Y", "Z"],
                   help="exact chains to solve (default: X when k <= 3, and Z)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", parents=[common], help="bound formulas for given k")
    p.add_argument("--k", type=_positive, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("concentration", parents=[common], help="coverage of the X_k interval")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=_positive, default=1)
    p.set_defaults(func=cmd_concentration)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "simulate" and args.trials < 2:
        parser.error("simulate needs --trials >= 2")
    try:
        text, code = _run_cached(args)
    except CapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PatternError as exc:
        msg = str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CAP if "too large" in msg or "capped" in msg else EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    if args.out:
        _write_with_manifest(Path(args.out), text, args.command, _params(args.command, args), code)
    return code


if __name__ == "__main__":
    sys.exit(main())
