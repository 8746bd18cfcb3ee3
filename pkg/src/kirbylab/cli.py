"""``kirbylab`` command line: run, classify, search, explain.

Exit codes: 0 verified, 1 a machine check failed, 2 usage, parse or I/O error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, lattice, rbd
from .annotations import anchor
from .errors import KirbyError, ScriptError
from .handles import h1 as h1_of
from .lattice import FormClass, IntSymMatrix
from .script import parse, replay_full

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENV_PATH = "KIRBYLAB_SCRIPT_PATH"


class UsageError(Exception):
    pass


def bundled_dir() -> Path:
    return Path(str(resources.files("kirbylab") / "scripts"))


def bundled_scripts() -> list[Path]:
    return sorted(bundled_dir().glob("*.kcs"))


def resolve(path: str) -> Path:
    """An existing path, else a match under KIRBYLAB_SCRIPT_PATH, else a bundled script."""
    p = Path(path)
    if p.is_file():
        return p
    dirs = [Path(d) for d in os.environ.get(ENV_PATH, "").split(os.pathsep) if d]
    dirs.append(bundled_dir())
    for d in dirs:
        for cand in (d / p, d / p.name):
            if cand.is_file():
                return cand
    raise UsageError(f"no such file: {path}")


def _read(path: str) -> tuple[Path, str]:
    p = resolve(path)
    try:
        return p, p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _replay(path: str):
    p, text = _read(path)
    return replay_full(parse(text), p.name)


def _header(args) -> None:
    if not args.no_header:
        stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        print(f"# kirbylab {__version__} {args.command} {stamp}")


def model_name(f: FormClass) -> Optional[str]:
    """Name of the unimodular model with ledger ``f`` (indefinite forms only)."""
    if f.rank == 0 or abs(f.signature) == f.rank:
        return None
    if f.parity == lattice.ODD:
        m, n = lattice.classify_indefinite_odd(f.rank, f.signature)
        return f"{m} CP^2 # {n} CP^2-bar-type"
    if f.signature % 8:
        return None
    k = f.signature // 8
    hyp = (f.rank - 8 * abs(k)) // 2
    e8 = f"{abs(k)} {'-' if k < 0 else ''}E8 + " if k else ""
    return f"{e8}{hyp} H-type"


def _kind(definiteness: str) -> str:
    return {"posdef": "positive definite", "negdef": "negative definite"}.get(definiteness, definiteness)


# -- subcommands -----------------------------------------------------------------

def cmd_run(args) -> int:
    res = _replay(args.path)
    _header(args)
    if args.format == "structured":
        sys.stdout.write(res.to_json())
    else:
        sys.stdout.write(res.to_text(verbose=args.verbose))
    return EXIT_OK if res.verified else EXIT_FAIL


def _classify_matrix(M: IntSymMatrix) -> dict:
    sig, nullity = lattice.signature(M)
    rank = M.n - nullity
    det = lattice.determinant(M)
    par = lattice.parity(M)
    kind = lattice._definiteness(rank, sig, nullity)
    out = {
        "rank": rank,
        "signature": sig,
        "nullity": nullity,
        "parity": par,
        "definiteness": _kind(kind),
        "det": det,
        "unimodular": abs(det) == 1,
        "model": None,
    }
    if abs(det) == 1:
        out["model"] = model_name(FormClass(rank, sig, par))
    return out


def _classify_ledger(path: str) -> tuple[dict, bool]:
    res = _replay(path)
    f = res.ledger
    if f is None:
        raise UsageError(f"{path}: the final form ledger is unknown")
    g = h1_of(res.state)
    unimodular = res.state.closed and g is not None and g.trivial
    out = {
        "rank": f.rank,
        "signature": f.signature,
        "nullity": 0,
        "parity": f.parity,
        "definiteness": _kind(f.definiteness),
        "det": None,
        "unimodular": unimodular,
        "model": model_name(f) if unimodular else None,
    }
    return out, res.verified


def cmd_classify(args) -> int:
    ok = True
    if args.path.endswith(".kcs"):
        info, ok = _classify_ledger(args.path)
    else:
        _, text = _read(args.path)
        try:
            M = IntSymMatrix.from_grid(text)
        except ValueError as exc:
            raise UsageError(f"malformed matrix: {exc}") from exc
        info = _classify_matrix(M)
    _header(args)
    if args.format == "structured":
        print(json.dumps(info, sort_keys=True, indent=2))
    else:
        print(f"rank: {info['rank']}")
        print(f"signature: {info['signature']}")
        print(f"nullity: {info['nullity']}")
        print(f"parity: {info['parity']}")
        print(f"definiteness: {info['definiteness']}")
        if info["det"] is not None:
            print(f"det: {info['det']} (magnitude {abs(info['det'])})")
        print(f"unimodular: {'yes' if info['unimodular'] else 'no'}")
        if info["model"]:
            print(f"model: {info['model']}")
        print(f"{info['parity']}, {info['definiteness']}, rank {info['rank']}, sigma {info['signature']}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search(args) -> int:
    if args.bound < 1:
        raise UsageError("bound must be at least 1")
    if args.p < 2:
        raise UsageError("p must be at least 2")
    res = _replay(args.path)
    if not res.verified:
        sys.stdout.write(res.to_text())
        return EXIT_FAIL
    X = res.state
    found = rbd.enumerate_embeddings(X, args.p, args.bound)
    _header(args)
    if args.format == "structured":
        payload = [
            {
                "handles": list(E.handle_labels),
                "multipliers": list(E.multipliers),
                "classes": [X.ambient.format(c) for c in E.classes],
            }
            for E in found
        ]
        print(json.dumps({"p": args.p, "bound": args.bound, "embeddings": payload}, sort_keys=True, indent=2))
        return EXIT_OK
    if not found:
        print(f"no embedding of C_{args.p} among the handle classes (bound {args.bound})")
    for n, E in enumerate(found, 1):
        print(f"embedding {n}: C_{args.p}")
        for i, (lbl, k, c) in enumerate(zip(E.handle_labels, E.multipliers, E.classes), 1):
            print(f"  u{i} = {'+' if k > 0 else '-'}{abs(k)} * {lbl} = {X.ambient.format(c)}")
    return EXIT_OK


def cmd_explain(args) -> int:
    p, text = _read(args.path)
    s = parse(text)
    rows = [(n, str(st), anchor(p.name, st)) for n, st in s.numbered()]
    _header(args)
    if args.format == "structured":
        print(json.dumps([{"line": n, "statement": t, "anchor": a} for n, t, a in rows], indent=2))
    else:
        for n, t, a in rows:
            print(f"{n:4d}  {t}")
            print(f"      -> {a}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--no-header", action="store_true", help="omit the timestamped header line")
    common.add_argument("--verbose", action="store_true", help="list every report entry")

    ap = argparse.ArgumentParser(prog="kirbylab", description="Replay and check Kirby calculus scripts.")
    ap.add_argument("--version", action="version", version=f"kirbylab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="replay a .kcs script")
    run.add_argument("path")
    run.set_defaults(func=cmd_run)

    cl = sub.add_parser("classify", parents=[common], help="classify a matrix grid or a script's final ledger")
    cl.add_argument("path")
    cl.set_defaults(func=cmd_classify)

    se = sub.add_parser("search", parents=[common], help="search C_p embeddings among handle classes")
    se.add_argument("path")
    se.add_argument("p", type=int)
    se.add_argument("bound", type=int, nargs="?", default=1)
    se.set_defaults(func=cmd_search)

    ex = sub.add_parser("explain", parents=[common], help="map script statements to the claims they witness")
    ex.add_argument("path")
    ex.set_defaults(func=cmd_explain)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ScriptError) as exc:
        print(f"kirbylab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KirbyError as exc:
        print(f"kirbylab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
