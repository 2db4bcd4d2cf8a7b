"""Command-line interface: ``choco enumerate|solve|search|perturb|verify``.

Exit codes: 0 success, 2 usage or validation error, 3 no feasible solution,
4 certification failure, 1 any other numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, fixtures, kernels
from .configuration import enumerate_configurations, parse_shorthand
from .errors import (
    CertificationFailed,
    ChocoError,
    InvalidConfiguration,
    NoFeasibleSolution,
    NotAFactor,
    OutOfRange,
    ParseError,
)
from .perturbation import certify_admissible, perturb, perturb_config
from .polynomial import Polynomial, dumps
from .solver import ResultCache, SolverSettings, best_delta, search_degree, solve_config

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_CERT = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    settings: dict
    rng_seed: int | None
    tool_version: str = __version__
    backend: str = kernels.BACKEND
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    input_digests: dict = field(default_factory=dict)


def _digest(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()[:16]


# argument parsing -----------------------------------------------------------

def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--precision", type=_nonneg_int, default=7, metavar="N",
                   help="decimal places for delta and parameters (default 7)")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=_nonneg_int, default=None,
                   help="random Newton starts (default 2000, or 20000 for deg x >= 14)")
    p.add_argument("--jobs", type=_nonneg_int, default=1, help="worker processes across configurations")
    p.add_argument("--cache-dir", metavar="PATH", default=None)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--time-budget", type=_positive_float, default=None, metavar="SECONDS",
                   help="wall-clock budget per system")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="choco", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"choco {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list square configurations of a degree")
    p.add_argument("--degree", type=int, required=True, help="deg x (even, >= 4)")
    _add_output(p)

    p = sub.add_parser("solve", help="solve one configuration and report the best feasible delta")
    p.add_argument("--config", required=True, help='shorthand such as "[3,1],[2],[1]"')
    p.add_argument("--warm-start", metavar="SPEC",
                   help='"published", a JSON object of unknown values, or a path to one')
    p.add_argument("--all", action="store_true", help="also list every candidate")
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("search", help="rank every configuration of a degree")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--allow-large-degree", action="store_true", help="permit deg x >= 16")
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("perturb", help="certified stable triple near a quasi-admissible solution")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--input", metavar="PATH",
                     help="JSON with delta, x, y, z, or with config (and values)")
    p.add_argument("--epsilon", type=_positive_float, required=True)
    p.add_argument("--warm-start", metavar="SPEC")
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("verify", help="check that delta is admissible via x and y")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="JSON {delta, x: [coeffs], y: [coeffs]}")
    src.add_argument("--fixture", choices=("chang-sahinidis",))
    p.add_argument("--delta", type=float, default=None, help="override delta from the input")
    _add_output(p)
    return ap


# helpers ----------------------------------------------------------------------

def _published_values(label: str) -> dict:
    table = {
        str(parse_shorthand(fixtures.DEG10_CONFIG)): fixtures.DEG10_SOLUTION,
        str(parse_shorthand(fixtures.DEG20_CONFIG)): fixtures.DEG20_SOLUTION,
        "[1],[],[]": fixtures.QUARTIC_SOLUTION,
    }
    if label not in table:
        raise UsageError(f"no published parameters for {label}")
    return table[label]


def _warm_start(source: str | None, label: str) -> tuple:
    if source is None:
        return ()
    if source == "published":
        return (_published_values(label),)
    text = source
    if not source.lstrip().startswith("{"):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read warm start {source}: {exc}")
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise UsageError(f"warm start is not JSON: {exc}")
    if isinstance(data, dict) and "best" in data and isinstance(data["best"], dict):
        b = data["best"]
        data = {"delta": b["delta"], **b["params"]}
    if not isinstance(data, dict):
        raise UsageError("warm start must be a JSON object of unknown values")
    return (data,)


def _settings(args, label: str | None = None) -> SolverSettings:
    warm = _warm_start(getattr(args, "warm_start", None), label) if label else ()
    starts = args.starts
    if warm and starts is None:
        starts = 0
    try:
        return SolverSettings(start_count=starts, rng_seed=args.seed, warm_starts=warm,
                              time_budget=args.time_budget)
    except ValueError as exc:
        raise UsageError(str(exc))


def _cache(args) -> ResultCache | None:
    if args.no_cache:
        return None
    return ResultCache(args.cache_dir)


def _fmt(v, prec: int) -> str:
    return f"{float(v):.{prec}f}"


def _emit(args, payload: dict, table_text: str, csv_rows: list | None, manifest: RunManifest) -> None:
    if args.format == "json":
        doc = {"manifest": asdict(manifest), **payload}
        text = dumps(doc, indent=1) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        buf.write("# manifest: " + json.dumps(asdict(manifest), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in csv_rows or []:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = table_text if table_text.endswith("\n") else table_text + "\n"
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if args.format == "table":
            # files always carry their manifest
            text = "# manifest: " + json.dumps(asdict(manifest), sort_keys=True) + "\n" + text
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# commands -----------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    if args.degree < 4 or args.degree % 2:
        raise UsageError(f"--degree must be an even integer >= 4, got {args.degree}")
    cfgs = enumerate_configurations(args.degree)
    manifest = RunManifest("enumerate", {"degree": args.degree}, None)
    payload = {"degree": args.degree, "count": len(cfgs), "configurations": [c.to_json() for c in cfgs]}
    if args.format == "json" and not args.out:
        # plain JSON array on stdout, as the listing contract promises
        sys.stdout.write(json.dumps([c.to_json() for c in cfgs]) + "\n")
        return EXIT_OK
    rows = [["config", "deg_x", "deg_y", "c"]] + [[str(c), c.deg_x, c.deg_y, c.c] for c in cfgs]
    _emit(args, payload, "\n".join(str(c) for c in cfgs), rows, manifest)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = parse_shorthand(args.config)
    label = str(cfg)
    if sum(cfg.m) + 2 != cfg.n_equations:
        raise UsageError(f"{label} is not square: {sum(cfg.m) + 2} unknowns, {cfg.n_equations} equations")
    settings = _settings(args, label)
    result = solve_config(cfg, settings, _cache(args))
    _note(f"{label}: {'cache hit' if result.from_cache else 'solved'}; "
          f"{result.starts} starts, {result.converged} converged, {result.iterations} Newton iterations"
          + ("; time budget exhausted" if result.truncated else ""))
    manifest = RunManifest("solve", settings.to_json(), settings.rng_seed,
                           input_digests={"config": _digest(label)})
    cands = result.candidates
    best = best_delta(cands)  # NoFeasibleSolution -> exit 3
    prec = args.precision
    lines = [f"config    {label}", f"delta     {_fmt(best.delta, prec)}"]
    lines += [f"{k:<9} {_fmt(v, prec)}" for k, v in best.params.items()]
    lines.append(f"residual  {best.residual_norm:.3e}")
    if args.all:
        lines.append("")
        lines.append(f"{'delta':>{prec + 4}}  feasible  residual   params")
        for c in cands:
            ps = " ".join(_fmt(v, prec) for v in c.params.values())
            lines.append(f"{_fmt(c.delta, prec):>{prec + 4}}  {str(c.feasible):<8}  {c.residual_norm:.2e}  {ps}")
    payload = {"config": label, "best": best.to_json(), "candidates": [c.to_json() for c in cands]}
    rows = [["delta", *best.params.keys(), "residual_norm", "feasible"]]
    rows += [[repr(c.delta), *(repr(v) for v in c.params.values()), repr(c.residual_norm), c.feasible]
             for c in (cands if args.all else [best])]
    _emit(args, payload, "\n".join(lines), rows, manifest)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.degree < 4 or args.degree % 2:
        raise UsageError(f"--degree must be an even integer >= 4, got {args.degree}")
    settings = _settings(args)
    try:
        rows = search_degree(args.degree, settings, jobs=max(1, args.jobs), cache=_cache(args),
                             allow_large_degree=args.allow_large_degree)
    except ValueError as exc:
        raise UsageError(str(exc))
    manifest = RunManifest("search", {**settings.to_json(), "degree": args.degree}, settings.rng_seed)
    prec = args.precision
    width = max([len(str(r.config)) for r in rows] + [6])
    lines = [f"{'rank':>4}  {'config':<{width}}  delta"]
    for i, r in enumerate(rows, 1):
        val = _fmt(r.candidate.delta, prec) if r.candidate else "-"
        lines.append(f"{i:>4}  {str(r.config):<{width}}  {val}")
    payload = {"degree": args.degree, "rows": [r.to_json() for r in rows]}
    csv_rows = [["rank", "config", "delta", "status"]]
    csv_rows += [[i, str(r.config), repr(r.candidate.delta) if r.candidate else "", r.status]
                 for i, r in enumerate(rows, 1)]
    _emit(args, payload, "\n".join(lines), csv_rows, manifest)
    return EXIT_OK


def _load_json(path: str) -> tuple[dict, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    try:
        return json.loads(text), text
    except ValueError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def cmd_perturb(args) -> int:
    digests = {}
    if args.input:
        data, text = _load_json(args.input)
        digests["input"] = _digest(text)
        if all(k in data for k in ("delta", "x", "y", "z")):
            settings = _settings(args)
            cert = perturb(data["delta"], Polynomial(data["x"]), Polynomial(data["y"]),
                           Polynomial(data["z"]), args.epsilon, source_config=data.get("config"))
        elif "config" in data:
            args.config = data["config"]
            values = data.get("values") or ({"delta": data["best"]["delta"], **data["best"]["params"]}
                                            if isinstance(data.get("best"), dict) else None)
            settings = _settings(args, str(parse_shorthand(args.config)))
            cert = _perturb_config(args, settings, values)
        else:
            raise UsageError("input needs delta, x, y, z or a config")
    else:
        settings = _settings(args, str(parse_shorthand(args.config)))
        digests["config"] = _digest(str(parse_shorthand(args.config)))
        cert = _perturb_config(args, settings, None)
    manifest = RunManifest("perturb", {**settings.to_json(), "epsilon": args.epsilon},
                           settings.rng_seed, input_digests=digests)
    prec = max(args.precision, 6)
    cr = cert.critical_root
    lines = [
        f"source        {cert.source_config or 'input triple'}",
        f"delta         {_fmt(cert.delta, prec)}",
        f"epsilon       {args.epsilon:g}",
        f"delta_hat     {_fmt(cert.delta_hat, prec)}",
        f"delta_eps     {_fmt(cert.delta_epsilon, prec)}",
        f"critical      {cr.real:.{prec}f} +- {abs(cr.imag):.{prec}f}i  (|r| - 1 = {abs(cr) - 1:.1e})",
        f"margins       x_hat {cert.margins[0]:.6e}  y_hat {cert.margins[1]:.6e}  z_hat {cert.margins[2]:.6e}",
        f"degrees       x_hat {cert.x_hat.degree}  y_hat {cert.y_hat.degree}  z_hat {cert.z_hat.degree}",
        f"identity      {cert.identity_residual:.3e}",
        "certified     yes",
    ]
    rows = [["delta_hat", "delta_epsilon", "margin_x", "margin_y", "margin_z", "identity_residual"],
            [repr(float(cert.delta_hat)), repr(cert.delta_epsilon), *map(repr, cert.margins),
             repr(cert.identity_residual)]]
    _emit(args, {"certificate": cert.to_json()}, "\n".join(lines), rows, manifest)
    return EXIT_OK


def _perturb_config(args, settings: SolverSettings, values):
    cfg = parse_shorthand(args.config)
    if values is None:
        result = solve_config(cfg, settings, _cache(args))
        values = best_delta(result.candidates).values
    return perturb_config(cfg, values, args.epsilon)


def cmd_verify(args) -> int:
    digests = {}
    if args.fixture:
        delta, x, y = fixtures.CS_DELTA, fixtures.CS_X, fixtures.CS_Y
        digests["fixture"] = args.fixture
    else:
        data, text = _load_json(args.input)
        digests["input"] = _digest(text)
        try:
            delta, x, y = data["delta"], Polynomial(data["x"]), Polynomial(data["y"])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"input needs delta, x and y: {exc}")
    if args.delta is not None:
        delta = args.delta
    manifest = RunManifest("verify", {"delta": delta}, None, input_digests=digests)
    try:
        cert = certify_admissible(delta, x, y)
    except CertificationFailed as exc:
        payload = {"certified": False, "delta": delta, "failed": exc.predicate, "detail": exc.detail}
        _emit(args, payload, f"delta      {delta}\ncertified  no\nfailed     {exc}",
              [["certified", "failed"], [False, exc.predicate]], manifest)
        return EXIT_CERT
    names = ("x", "y", "z")
    lines = [f"delta      {delta}"]
    lines += [f"{n}          stable, margin {m:.6e}, degree {p.degree}"
              for n, m, p in zip(names, cert.margins, (cert.x_hat, cert.y_hat, cert.z_hat))]
    lines += [f"identity   {cert.identity_residual:.3e}", "certified  yes"]
    payload = {"certified": True, "delta": delta, "margins": cert.margins,
               "identity_residual": cert.identity_residual, "z": cert.z_hat.to_json()}
    _emit(args, payload, "\n".join(lines),
          [["certified", "margin_x", "margin_y", "margin_z"], [True, *cert.margins]], manifest)
    return EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "solve": cmd_solve, "search": cmd_search,
            "perturb": cmd_perturb, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, InvalidConfiguration, OutOfRange) as exc:
        print(f"choco {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoFeasibleSolution as exc:
        print(f"choco {args.command}: no feasible solution: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CertificationFailed, NotAFactor) as exc:
        print(f"choco {args.command}: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except ChocoError as exc:
        print(f"choco {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
