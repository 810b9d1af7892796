"""Command-line front end: ``riesz-lab {eval,sample,check,table,sv-density}``.

Parameters are read from JSON files.  Matrices are either nested lists
(real case) or coordinate-plane literals such as
``{"n": 2, "m": 2, "beta": 2, "re": [[...]], "im": [[...]]}``.  Bulk output
is CSV or JSON lines; non-finite values are written as the token ``-inf``.

Exit codes: 0 success, 1 failed checks, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dens, hwv, jack, linalg, sampler, specfun, verify
from .errors import RieszLabError
from .params import BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams

DISTS = ("riesz", "kotzriesz", "triesz", "beta-riesz")
SYMBOL = {"riesz": "v", "kotzriesz": "y", "triesz": "t", "beta-riesz": "f"}
FIELDS = {
    "riesz": {"a", "kappa", "Xi", "beta", "variant"},
    "kotzriesz": {"n", "kappa", "beta", "variant", "mu", "Theta", "Sigma"},
    "triesz": {"n", "nu", "k", "tau", "rho", "beta", "variant", "mu", "Theta", "Sigma"},
    "beta-riesz": {"n", "nu", "k", "tau", "rho", "beta", "variant", "Sigma"},
}
MATRIX_FIELDS = {"Xi", "mu", "Theta", "Sigma"}
DEFAULTS = {
    ("riesz", "I"): {"a": 3.0, "kappa": [1, 0]},
    ("riesz", "II"): {"a": 3.0, "kappa": [0, -1]},
    ("kotzriesz", "I"): {"n": 3, "kappa": [1, 0]},
    ("kotzriesz", "II"): {"n": 3, "kappa": [0, -1]},
    ("triesz", "I"): {"n": 3, "nu": 4.0, "k": 0.0, "tau": [1, 0]},
    ("triesz", "II"): {"n": 3, "nu": 4.0, "k": 0.0, "tau": [0, -1]},
    ("beta-riesz", "I"): {"n": 3, "nu": 4.0, "k": 0.0, "tau": [1, 0]},
    ("beta-riesz", "II"): {"n": 3, "nu": 4.0, "k": 0.0, "tau": [0, -1]},
}
CHUNK = 10_000


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})")


def _matrix(obj, beta):
    if isinstance(obj, dict):
        obj = dict(obj)
        if int(obj.setdefault("beta", beta)) != beta:
            raise UsageError(f"matrix literal has beta={obj['beta']}, expected {beta}")
        if "re" in obj:
            shape = np.shape(obj["re"])
            if len(shape) == 2:
                obj.setdefault("n", shape[0])
                obj.setdefault("m", shape[1])
        return linalg.AlgMatrix.from_json(obj).native()
    if beta != 1:
        raise UsageError("non-real matrices must be given as coordinate-plane literals")
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def split_dist(dist: str, variant: str | None) -> tuple[str, str]:
    """``triesz-II`` -> ``("triesz", "II")``; ``--variant`` must agree if given."""
    base, _, suffix = dist.rpartition("-")
    if suffix.upper() in ("I", "II") and base in DISTS:
        if variant is not None and variant.upper() != suffix.upper():
            raise UsageError(f"--dist {dist} conflicts with --variant {variant}")
        return base, suffix.upper()
    if dist not in DISTS:
        raise UsageError(f"unknown distribution {dist!r}; choose from {', '.join(DISTS)}"
                         " with optional -I/-II suffix")
    return dist, (variant or "I").upper()


def build_params(dist: str, variant: str, obj: dict | None):
    """Typed parameter bundle from a JSON object; unknown fields are rejected."""
    obj = dict(DEFAULTS[(dist, variant)] if obj is None else obj)
    unknown = set(obj) - FIELDS[dist]
    if unknown:
        raise UsageError(f"unknown parameter fields for {dist}: {sorted(unknown)}")
    if "variant" in obj and str(obj["variant"]).upper() != variant:
        raise UsageError(f"params variant {obj['variant']!r} conflicts with {variant}")
    obj["variant"] = variant
    beta = int(obj.get("beta", 1))
    obj["beta"] = beta
    for key in MATRIX_FIELDS & set(obj):
        if obj[key] is not None:
            obj[key] = _matrix(obj[key], beta)
    cls = {"riesz": RieszParams, "kotzriesz": KotzRieszParams,
           "triesz": TRieszParams, "beta-riesz": BetaRieszParams}[dist]
    try:
        return cls(**obj)
    except TypeError as exc:
        raise UsageError(f"missing parameter for {dist}: {exc}")


def _token(x: float) -> str:
    x = float(x)
    if math.isfinite(x):
        return repr(x)
    return "-inf" if x < 0 else ("inf" if x > 0 else "nan")


def _json_number(x: float):
    x = float(x)
    return x if math.isfinite(x) else _token(x)


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    dist, variant = split_dist(args.dist, args.variant)
    p = build_params(dist, variant, _load_json(args.params) if args.params else None)
    if not args.point:
        raise UsageError("eval needs --point")
    pts = _load_json(args.point)
    # a list of literals, a list of nested lists, or a single matrix
    if not (isinstance(pts, list) and pts and (isinstance(pts[0], dict) or np.ndim(pts) == 3)):
        pts = [pts]
    fn = verify.DENSITIES[dist]
    with _open_out(args.output) as out:
        for pt in pts:
            x = _matrix(pt, p.beta)
            out.write(json.dumps({"logpdf": _json_number(fn(x, p))}) + "\n")
    return 0


def _draw_chunks(dist, p, n, stream):
    draw = sampler.SAMPLERS[dist]
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]

    def one(i):
        return linalg.to_coords(draw(stream.generator(i), p, sizes[i]), p.beta)

    workers = verify.thread_count()
    if workers == 1 or len(sizes) == 1:
        yield from (one(i) for i in range(len(sizes)))
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(one, range(len(sizes)))


def cmd_sample(args) -> int:
    dist, variant = split_dist(args.dist, args.variant)
    p = build_params(dist, variant, _load_json(args.params) if args.params else None)
    if args.n is None or args.n < 1:
        raise UsageError("sample needs --n >= 1")
    stream = sampler.RngStream(args.seed, args.stream)
    names = linalg.COORD_NAMES[p.beta]
    sym = SYMBOL[dist]
    header = {"dist": f"{dist}-{variant}", "seed": args.seed, "stream": args.stream,
              "n": args.n}
    with _open_out(args.output) as out:
        first = True
        for coords in _draw_chunks(dist, p, args.n, stream):
            _, rows, cols = coords.shape[1:]
            if first:
                if args.format == "csv":
                    out.write("# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n")
                    out.write(",".join(f"{sym}_{i + 1}_{j + 1}_{nm}" for i in range(rows)
                                       for j in range(cols) for nm in names) + "\n")
                else:
                    out.write(json.dumps(header) + "\n")
                first = False
            # coordinate planes last so that each entry's components are adjacent
            flat = np.moveaxis(coords, 1, -1).reshape(coords.shape[0], -1)
            for row in flat:
                if args.format == "csv":
                    out.write(",".join(_token(v) for v in row) + "\n")
                else:
                    lit = {"n": rows, "m": cols, "beta": p.beta}
                    planes = row.reshape(rows, cols, len(names))
                    for k, nm in enumerate(names):
                        lit[nm] = planes[..., k].tolist()
                    out.write(json.dumps(lit) + "\n")
    return 0


def cmd_check(args) -> int:
    jobs = verify.default_jobs()
    if args.suite == "quick":
        jobs = {k: v for k, v in jobs.items()
                if k.startswith(("jacobian/", "gamma-integral/a=3/k=(2,)"))
                or k.endswith("m=1/beta=1")}
    elif args.suite != "default":
        raise UsageError(f"unknown suite {args.suite!r}; choose 'default' or 'quick'")
    reports = verify.run_suite(args.seed, jobs)
    payload = json.dumps([{k: _json_number(v) if isinstance(v, float) else v
                           for k, v in r.to_dict().items()} for r in reports], indent=1)
    with _open_out(args.output) as out:
        out.write(payload + "\n")
    print(verify.format_table(reports), file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def _grid(text) -> np.ndarray:
    if text is None:
        raise UsageError("--grid is required")
    if Path(text).is_file():
        return np.asarray(_load_json(text), dtype=float)
    parts = text.split(":")
    if len(parts) == 3:
        try:
            return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            pass
    try:
        return np.asarray(json.loads(text), dtype=float)
    except json.JSONDecodeError:
        raise UsageError("--grid must be 'start:stop:count', a JSON list or a JSON file")


TABLE_FUNCTIONS = ("lgamma_m", "lgamma_m_weighted", "log_gen_pochhammer", "jack_C")


def cmd_table(args) -> int:
    fn = args.function
    obj = _load_json(args.params) if args.params else {}
    allowed = {"beta", "m", "kappa", "sign", "tau"}
    unknown = set(obj) - allowed
    if unknown:
        raise UsageError(f"unknown parameter fields for table: {sorted(unknown)}")
    beta = int(obj.get("beta", 1))
    grid = _grid(args.grid)
    with _open_out(args.output) as out:
        out.write(f"# function={fn} " + " ".join(f"{k}={json.dumps(v)}"
                                                   for k, v in sorted(obj.items())) + "\n")
        if fn == "jack_C":
            tau = obj.get("tau", [1])
            grid = np.atleast_2d(grid)
            out.write(",".join([f"x_{i + 1}" for i in range(grid.shape[1])] + ["value"]) + "\n")
            vals = jack.jack_C(tau, grid, beta)
            for x, v in zip(grid, np.atleast_1d(vals)):
                out.write(",".join([_token(t) for t in x] + [_token(v)]) + "\n")
            return 0
        out.write("a,value\n")
        for a in np.ravel(grid):
            if fn == "lgamma_m":
                v = specfun.lgamma_m(a, beta, int(obj.get("m", 1)))
            elif fn == "lgamma_m_weighted":
                v = specfun.lgamma_m_weighted(a, obj.get("kappa", [0]), beta, None,
                                              int(obj.get("sign", 1)))
            else:
                v = specfun.log_gen_pochhammer(a, obj.get("kappa", [0]), beta)
            out.write(f"{_token(a)},{_token(v)}\n")
    return 0


def cmd_sv_density(args) -> int:
    obj = _load_json(args.params) if args.params else None
    variant = (args.variant or (obj or {}).get("variant") or "I").upper()
    obj = dict(DEFAULTS[("triesz", variant)] if obj is None else obj)
    unknown = set(obj) - {"n", "nu", "k", "tau", "rho", "beta", "variant"}
    if unknown:
        raise UsageError(f"unknown parameter fields for sv-density: {sorted(unknown)}")
    obj["variant"] = variant
    p = TRieszParams(**obj)
    grid = np.atleast_2d(_grid(args.grid))
    kind = (args.dist or "sv").lower()
    if kind not in ("sv", "eig"):
        raise UsageError("sv-density --dist must be 'sv' or 'eig'")
    fn = dens.sv_triesz_logpdf if kind == "sv" else dens.eig_beta_riesz_logpdf
    sym = "alpha" if kind == "sv" else "gamma"
    with _open_out(args.output) as out:
        out.write(f"# {kind} density, variant {variant}, beta={p.beta}\n")
        out.write(",".join([f"{sym}_{i + 1}" for i in range(grid.shape[1])] + ["logpdf"]) + "\n")
        for row, v in zip(grid, np.atleast_1d(fn(grid, p))):
            out.write(",".join([_token(x) for x in row] + [_token(v)]) + "\n")
    return 0


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riesz-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--params", help="JSON parameter file")
        sp.add_argument("--output", help="output file (default: stdout)")

    sp = sub.add_parser("eval", help="evaluate a log-density at one or more points")
    common(sp)
    sp.add_argument("--dist", required=True)
    sp.add_argument("--variant", choices=["I", "II"])
    sp.add_argument("--point", help="JSON matrix literal or list of literals")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sample", help="draw samples")
    common(sp)
    sp.add_argument("--dist", required=True)
    sp.add_argument("--variant", choices=["I", "II"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("check", help="run the verification suite")
    sp.add_argument("--suite", default="default")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", help="JSON report file (default: stdout)")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("table", help="tabulate a special function on a grid")
    common(sp)
    sp.add_argument("--function", choices=TABLE_FUNCTIONS, default="lgamma_m")
    sp.add_argument("--grid")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("sv-density", help="singular value or eigenvalue density on a grid")
    common(sp)
    sp.add_argument("--dist", choices=["sv", "eig"], default="sv")
    sp.add_argument("--variant", choices=["I", "II"])
    sp.add_argument("--grid")
    sp.set_defaults(func=cmd_sv_density)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, RieszLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
