"""Command-line interface: ``orlicz-radius <subcommand> ...``.

Results go to stdout as ``key=value`` lines; human-readable tables go to
stderr with ``--verbose``.  Exit status: 0 success, 1 violations found,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _rng
from .bounds import (
    CATALOGUE,
    BoundCase,
    CaseError,
    Quantities,
    SUITE_GRID,
    Tolerance,
    catalogue_rows,
    evaluate_batch,
    evaluate_bound,
    evaluate_vector_batch,
    normalization,
)
from .bounds.catalogue import PARAM_NAMES, _coerce
from .bounds.evaluate import DEFAULT_TOL_ABS, DEFAULT_TOL_REL
from .ensembles import FAMILIES, EnsembleSpec, generate, generate_batch
from .harness import (
    ConfigError,
    bundled_config,
    draw_vectors,
    export_report,
    load_config,
    run_suite,
    vector_inputs,
)
from .linalg import MatrixError, load_matrix, save_matrix
from .numrad import DEFAULT_GRID, DEFAULT_TOL, numerical_radius, radius_oracle, range_boundary
from .orlicz import OrliczDomainError, check_submultiplicative, inverse

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
JOBS_ENV = "ORLICZ_RADIUS_JOBS"
INVERSE_TOL = 1e-10


class UsageError(Exception):
    """Bad flag combination detected after argument parsing."""


def _out(key: str, value) -> None:
    if isinstance(value, float):
        value = repr(value)
    elif isinstance(value, bool):
        value = "true" if value else "false"
    print(f"{key}={value}")


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [["" if c is None else (f"{c:.6g}" if isinstance(c, float) else str(c)) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if not raw:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise UsageError(f"{JOBS_ENV} must be a positive integer, got {raw!r}") from None
    if jobs < 1:
        raise UsageError(f"{JOBS_ENV} must be a positive integer, got {raw!r}")
    return jobs


# -- case construction -----------------------------------------------------------


def _parse_case(args) -> BoundCase:
    """The case named by ``--case`` with ``--phi``/``--param`` overrides applied.

    A tabulated phi used by a case that needs sub-multiplicativity gets a
    grid-checked status attached (draws outside the checked range are then
    reported inapplicable).
    """
    key = args.case.strip()
    ident, bracket, body = key.partition("[")
    if bracket and not body.endswith("]"):
        raise CaseError(f"malformed case key {key!r}")
    raw = {}
    for item in filter(None, (p.strip() for p in body[:-1].split(";") if bracket)):
        name, eq, value = item.partition("=")
        if not eq:
            raise CaseError(f"bad parameter {item!r} in {key!r}")
        raw[name.strip()] = value.strip()
    for item in args.param or []:
        name, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"--param expects name=value, got {item!r}")
        raw[name.strip()] = value.strip()
    if getattr(args, "phi", None):
        raw["phi"] = args.phi
    unknown = sorted(set(raw) - set(PARAM_NAMES))
    if unknown:
        raise CaseError(f"unknown parameter(s) {', '.join(unknown)} for {ident}")
    kwargs = {name: _coerce(name, value) for name, value in raw.items()}
    info = CATALOGUE.get(ident)
    phi = kwargs.get("phi")
    if info is not None and info.submult and phi is not None and phi.kind == "custom" and not phi.submult.admissible:
        kwargs["phi"] = phi.with_submult(check_submultiplicative(phi).as_status())
    try:
        return BoundCase(ident, **kwargs)
    except CaseError:
        raise
    except ValueError as exc:
        raise CaseError(str(exc)) from None


def _tolerance(args) -> Tolerance:
    if args.tol_abs < 0 or args.tol_rel < 0:
        raise UsageError("tolerances must be nonnegative")
    return Tolerance(args.tol_abs, args.tol_rel)


def _ensemble_from_args(args, count: int | None = None) -> EnsembleSpec:
    if getattr(args, "ensemble", None):
        with open(args.ensemble) as fh:
            spec = EnsembleSpec.from_json(json.load(fh))
        return spec
    params = json.loads(args.params) if getattr(args, "params", None) else {}
    return EnsembleSpec(args.family, args.size, count if count is not None else args.count, args.seed, params)


# -- radius -----------------------------------------------------------------------


def cmd_radius(args) -> int:
    T = load_matrix(args.matrix)
    res = numerical_radius(T, grid=args.grid, tol=args.tol)
    _out("w", res.value)
    _out("theta_star", res.theta_star)
    _out("certified_error", res.certified_error)
    _out("grid_points", res.grid_points)
    _out("refinements", res.refinements)
    if args.oracle:
        _out("oracle", radius_oracle(T, args.oracle, seed=args.seed))
        _out("oracle_seed", args.seed)
    if args.boundary is not None:
        if args.boundary < 3:
            raise UsageError("--boundary needs at least 3 points")
        pts = range_boundary(T, args.boundary)
        theta = 2.0 * np.pi * np.arange(args.boundary) / args.boundary
        path = Path(args.boundary_out) if args.boundary_out else Path(args.matrix).with_suffix("").with_name(
            Path(args.matrix).stem + "_boundary.csv"
        )
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "re", "im"])
            for t, z in zip(theta, pts):
                writer.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])
        _out("boundary_file", str(path))
        _out("boundary_points", args.boundary)
    return EXIT_OK


# -- bound ------------------------------------------------------------------------


def _evaluation_lines(ev, prefix: str = "") -> None:
    _out(prefix + "status", ev.status)
    for i, (name, value) in enumerate(zip(ev.names, ev.chain)):
        _out(f"{prefix}chain.{i}.name", name)
        _out(f"{prefix}chain.{i}", value)
    for i, (slack, ok, ratio) in enumerate(zip(ev.slack, ev.passed, ev.ratios)):
        _out(f"{prefix}link.{i}.slack", slack)
        _out(f"{prefix}link.{i}.ratio", ratio)
        _out(f"{prefix}link.{i}.pass", ok)
    finite = [r for r in ev.ratios if math.isfinite(r)]
    _out(prefix + "max_ratio", max(finite) if finite else float("nan"))
    for name, value in ev.diagnostics.items():
        _out(f"{prefix}diagnostic.{name}", value)


def cmd_bound(args) -> int:
    case = _parse_case(args)
    tol = _tolerance(args)
    if args.corrupt <= 0:
        raise UsageError("--corrupt must be positive")
    file_mode = args.matrix is not None
    ens_mode = args.family is not None
    if file_mode == ens_mode:
        raise UsageError("give either a matrix file or --family/--size/--seed/--index")
    if case.info.kind == "vector":
        if not ens_mode:
            raise UsageError(f"{case.id} is a vector lemma; reproduce it from an ensemble draw (--family ...)")
        spec = EnsembleSpec(args.family, args.size, args.index + 1, args.seed, json.loads(args.params or "{}"))
        T = generate(spec, args.index)[None]
        vecs = draw_vectors(spec, [args.index])
        scale = normalization(case, np.linalg.norm(T, ord=2, axis=(1, 2)))
        batch = evaluate_vector_batch(case, vector_inputs(case, T, vecs, scale), tol, args.corrupt)
        batch.scale = scale
        ev = batch.row(0, {"family": args.family, "n": args.size, "seed": args.seed, "index": args.index})
    else:
        if file_mode:
            T = load_matrix(args.matrix)
            S = load_matrix(args.S) if args.S else None
            inputs = {"file": str(args.matrix)} | ({"S_file": str(args.S)} if args.S else {})
        else:
            spec = EnsembleSpec(args.family, args.size, args.index + 1, args.seed, json.loads(args.params or "{}"))
            T = generate(spec, args.index)
            S = generate(spec.paired(), args.index) if case.info.pair else None
            inputs = {"family": args.family, "n": args.size, "seed": args.seed, "index": args.index}
        if case.info.pair and S is None:
            raise UsageError(f"{case.id} needs a second operator (--S FILE)")
        if not case.info.pair and S is not None:
            raise UsageError(f"{case.id} takes a single operator; drop --S")
        ev = evaluate_bound(
            case,
            T,
            S,
            tol_abs=tol.abs,
            tol_rel=tol.rel,
            grid=args.grid,
            normalize=not args.no_normalize,
            corrupt=args.corrupt,
            inputs=inputs,
        )
    _out("case", case.key)
    for k, v in ev.inputs.items():
        _out(f"input.{k}", v)
    if args.corrupt != 1.0:
        _out("corrupt", args.corrupt)
    _evaluation_lines(ev)
    if args.verbose:
        for k, v in ev.quantities.items():
            print(f"  {k:24s} {v:.17g}", file=sys.stderr)
        rows = [[n, v] for n, v in zip(ev.names, ev.chain)]
        print(_table(rows, ["member", "value"]), file=sys.stderr)
    if args.json:
        Path(args.json).write_text(json.dumps(ev.to_json(), indent=1, sort_keys=True) + "\n")
    return EXIT_VIOLATION if ev.status == "fail" else EXIT_OK


# -- verify -----------------------------------------------------------------------


def _load_suite(name: str):
    if name in ("default", "default_suite"):
        return bundled_config("default_suite")
    if name in ("selftest", "selftest_corrupted"):
        return bundled_config("selftest_corrupted")
    return load_config(name)


def cmd_verify(args) -> int:
    config = _load_suite(args.suite)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        raise UsageError("--jobs must be positive")

    def progress(done, total):
        if args.verbose:
            print(f"  unit {done}/{total}", file=sys.stderr)

    report = run_suite(config, jobs=jobs, progress=progress)
    fmt = args.format or ("csv" if args.out and str(args.out).endswith(".csv") else "json")
    if args.out:
        export_report(report, fmt, args.out)
    s = report.summary
    for key in ("cases", "units", "evaluations", "passed", "violations", "untestable", "inapplicable", "grazes"):
        _out(key, s[key])
    _out("wall_time", round(report.data["wall_time"], 3))
    _out("jobs", jobs)
    if args.out:
        _out("report", str(args.out))
        _out("format", fmt)
    for rep in report.reproductions()[: args.max_witnesses]:
        e = rep["ensemble"]
        _out(
            "violation",
            f"{rep['case']}|family={e['family']}|n={e['n']}|seed={e['seed']}|index={rep['index']}"
            f"|link={rep['link']}|slack={rep['slack']!r}|corrupt={rep['corrupt']}",
        )
    if args.verbose:
        rows = [
            [r["case"], r["label"], r["ensemble"]["n"], r["evaluations"], r["violations"], r["untestable"],
             max((l["max_ratio"] for l in r["links"] if isinstance(l["max_ratio"], float)), default=None)]
            for r in report.results
        ]
        print(_table(rows, ["case", "ensemble", "n", "evals", "viol", "untest", "max_ratio"]), file=sys.stderr)
    return EXIT_VIOLATION if report.violations else EXIT_OK


# -- compare -----------------------------------------------------------------------


def _lhs_form(case: BoundCase):
    """``(phi, k)`` such that a chain's left-hand side is ``phi(w^k)``."""
    cid = case.id
    phi = case.phi
    if cid == "base_norm":
        return None
    if cid in ("power_norm",) and phi.kind == "exp_minus_one":
        return (None, 1.0)
    if cid in ("base_kittaneh", "cor_nil", "cor_N222", "cor_nilpotent"):
        return (None, 1.0)
    if cid in ("base_abuomar", "base_bhunia", "cor_22", "cor_1_1", "cor_1_2"):
        return (None, 2.0)
    if cid == "cor_prop1":
        return (None, 4.0)
    if cid == "base_elhaddad":
        return (None, 2.0 * case.r)
    if cid in ("power_norm", "cor_halfsum"):
        return (phi, 1.0)
    if cid == "th7_power":
        return (phi, float(case.n))
    return (phi, 2.0)


def w_estimate(case: BoundCase, values: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Upper estimates of ``w(T)`` from the first right-hand side of each chain."""
    form = _lhs_form(case)
    if form is None:
        est = values[:, -1]
    else:
        phi, k = form
        rhs = values[:, 1]
        if phi is not None and not (phi.kind == "power" and phi.params == (1.0,)):
            cap = phi.masked(phi.limit) if np.isfinite(phi.limit) else np.inf
            ok = np.isfinite(rhs) & (rhs >= 0) & (rhs <= cap)
            t = np.full(rhs.shape, np.nan)
            if np.any(ok):
                t[ok] = inverse(phi, rhs[ok], tol=INVERSE_TOL)
            rhs = t
        est = np.power(np.maximum(rhs, 0.0), 1.0 / k)
    return est / scale


def cmd_compare(args) -> int:
    ids = [b for b in (args.bounds or "").split(",") if b.strip()]
    if not ids:
        raise UsageError("--bounds needs at least one case id")
    cases = [BoundCase.parse(b) for b in ids]
    for c in cases:
        if c.info.kind != "operator" or c.info.pair:
            raise UsageError(f"{c.id} does not bound w(T) of a single operator; it cannot be compared")
    spec = _ensemble_from_args(args)
    T = generate_batch(spec)
    q = Quantities(T, grid=args.grid)
    w = q.w()
    tol = _tolerance(args)
    columns = {}
    for c in cases:
        batch = evaluate_batch(c, q, tol)
        est = w_estimate(c, batch.values, batch.scale)
        est = np.where(batch.status == "inapplicable", np.nan, est)
        columns[c.key] = est
    order = np.arange(spec.count)  # one seed per ensemble: draw order
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["seed", "index", "w"] + list(columns))
    for i in order:
        writer.writerow([spec.seed, int(i), repr(float(w[i]))] + [repr(float(columns[k][i])) for k in columns])
    if args.out and args.out != "-":
        Path(args.out).write_text(buf.getvalue())
        _out("out", args.out)
    else:
        sys.stdout.write(buf.getvalue())
    _out("rows", spec.count)
    bad = 0
    for key, est in columns.items():
        gap = est - w
        finite = np.isfinite(gap)
        low = finite & (gap < -(tol.abs + tol.rel * np.maximum(1.0, w)))
        bad += int(np.sum(low))
        _out(f"min_gap.{key}", float(np.min(gap[finite])) if np.any(finite) else float("nan"))
        _out(f"mean_gap.{key}", float(np.mean(gap[finite])) if np.any(finite) else float("nan"))
    _out("below_w", bad)
    return EXIT_VIOLATION if bad else EXIT_OK


# -- fuzz ---------------------------------------------------------------------------

FUZZ_BATCH = 16


def _best_link(batch):
    ratios = batch.ratios()
    tested = (batch.status == "pass") | (batch.status == "fail")
    ratios = np.where(tested[:, None] & np.isfinite(ratios), ratios, -np.inf)
    flat = int(np.argmax(ratios))
    i, j = divmod(flat, ratios.shape[1])
    return float(ratios[i, j]), i, j


def cmd_fuzz(args) -> int:
    if args.seconds is not None and args.seconds <= 0:
        raise UsageError("--seconds must be positive")
    if args.iterations is not None and args.iterations <= 0:
        raise UsageError("--iterations must be positive")
    case = _parse_case(args)
    if case.info.kind != "operator":
        raise UsageError(f"{case.id} is a vector lemma; fuzzing supports operator cases")
    tol = _tolerance(args)
    seconds = args.seconds if args.seconds is not None else (None if args.iterations else 10.0)
    deadline = None if seconds is None else time.monotonic() + seconds
    spec = EnsembleSpec(args.family, args.size, 1 << 62, args.seed)

    best = (-np.inf, None, None, None, None)  # ratio, link, T, S, batch row
    done = 0
    start_index = 0
    step = 0
    while True:
        if deadline is not None and time.monotonic() >= deadline:
            break
        if args.iterations is not None and done >= args.iterations:
            break
        size = FUZZ_BATCH if args.iterations is None else min(FUZZ_BATCH, args.iterations - done)
        if best[2] is None or step % 2 == 0:
            # fresh draws from the ensemble stream
            idx = range(start_index, start_index + size)
            start_index += size
            T = np.stack([generate(spec, i) for i in idx])
            S = np.stack([generate(spec.paired(), i) for i in idx]) if case.info.pair else None
        else:
            # local moves around the incumbent
            n = args.size
            g = _rng.complex_gaussians(args.seed, f"fuzz|{step}", 2 * size * n * n).reshape(2, size, n, n)
            radius = 0.3 * 0.7 ** ((step // 2) % 12) * max(1.0, float(np.linalg.norm(best[2], 2)))
            T = best[2][None] + radius * g[0] / np.sqrt(n)
            S = best[3][None] + radius * g[1] / np.sqrt(n) if case.info.pair else None
        step += 1
        batch = evaluate_batch(case, Quantities(T, S, grid=args.grid), tol)
        ratio, i, j = _best_link(batch)
        if ratio > best[0]:
            best = (ratio, j, T[i].copy(), None if S is None else S[i].copy(), batch.row(i))
        done += size

    if best[2] is None:
        raise UsageError("no evaluations were completed; increase --seconds or --iterations")
    ratio, link, Tb, Sb, ev = best
    out = Path(args.out)
    save_matrix(Tb, out)
    _out("case", case.key)
    _out("seed", args.seed)
    _out("family", args.family)
    _out("n", args.size)
    _out("evaluations", done)
    _out("best_ratio", ratio)
    _out("best_link", f"{ev.names[link]} <= {ev.names[link + 1]}")
    _out("witness_file", str(out))
    if Sb is not None:
        s_out = out.with_name(out.stem + "_S" + out.suffix)
        save_matrix(Sb, s_out)
        _out("witness_S_file", str(s_out))
    violation = ev.status == "fail"
    _out("violation", violation)
    return EXIT_VIOLATION if violation else EXIT_OK


# -- catalogue -----------------------------------------------------------------------


def cmd_catalogue(args) -> int:
    rows = catalogue_rows()
    header = ["id", "params", "needs", "anchor", "chain"]
    if args.format == "json":
        print(json.dumps(rows, indent=1))
    elif args.format == "csv":
        writer = csv.DictWriter(sys.stdout, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    else:
        print(_table([[r[h] for h in header] for r in rows], header))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def _add_tol(p):
    p.add_argument("--tol-abs", type=float, default=DEFAULT_TOL_ABS, help="absolute link tolerance (default 1e-7)")
    p.add_argument("--tol-rel", type=float, default=DEFAULT_TOL_REL, help="relative link tolerance (default 1e-7)")


def _add_case(p, required=True):
    p.add_argument("--case", required=required, help="case id or key, e.g. 'th3_alpha[alpha=0.5;phi=expm1;variant=A]'")
    p.add_argument("--phi", help="Orlicz function: power:p=2, expm1, powerlog:p=1, expsq, table:file.csv")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a case parameter (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orlicz-radius", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radius", help="numerical radius of a matrix file")
    p.add_argument("matrix", help="matrix file (JSON or text format)")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--boundary", type=int, metavar="M", help="also write M boundary points of the numerical range")
    p.add_argument("--boundary-out", help="CSV path for --boundary (default: <matrix>_boundary.csv)")
    p.add_argument("--oracle", type=int, metavar="SAMPLES", help="also report the sampling lower bound")
    p.add_argument("--seed", type=int, default=0, help="seed for --oracle (default 0)")
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("bound", help="evaluate one bound on a matrix file or an ensemble draw")
    _add_case(p)
    p.add_argument("matrix", nargs="?", help="matrix file for T")
    p.add_argument("--S", help="matrix file for the second operator")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--size", type=int, default=3, help="dimension for --family (default 3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--params", help="ensemble params as JSON (scaled family)")
    p.add_argument("--corrupt", type=float, default=1.0, help="scale the outermost right-hand side (self-test)")
    p.add_argument("--grid", type=int, default=SUITE_GRID)
    p.add_argument("--no-normalize", action="store_true", help="do not rescale T for exponential functions")
    p.add_argument("--json", help="also write the evaluation as JSON")
    p.add_argument("--verbose", action="store_true")
    _add_tol(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="default", help="suite JSON, or 'default' / 'selftest'")
    p.add_argument("--out", help="report path")
    p.add_argument("--format", choices=("json", "csv"), help="report format (default from --out suffix, else json)")
    p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.add_argument("--max-witnesses", type=int, default=20)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="compare bounds as upper estimates of w(T)")
    p.add_argument("--bounds", required=True, help="comma-separated case ids or keys")
    p.add_argument("--ensemble", help="ensemble spec JSON file")
    p.add_argument("--family", choices=FAMILIES, default="ginibre")
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", help="ensemble params as JSON")
    p.add_argument("--grid", type=int, default=SUITE_GRID)
    p.add_argument("--out", help="CSV path (default stdout)")
    _add_tol(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fuzz", help="search for the tightest input of a bound")
    _add_case(p)
    p.add_argument("--seconds", type=float, help="time budget (default 10 unless --iterations is given)")
    p.add_argument("--iterations", type=int, help="number of evaluations (makes the run reproducible)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=FAMILIES, default="ginibre")
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--grid", type=int, default=SUITE_GRID)
    p.add_argument("--out", default="fuzz_witness.json", help="witness matrix file")
    _add_tol(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("catalogue", help="list the bound catalogue")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=cmd_catalogue)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (MatrixError, ConfigError, CaseError, OrliczDomainError, OSError, json.JSONDecodeError, ValueError, IndexError) as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
