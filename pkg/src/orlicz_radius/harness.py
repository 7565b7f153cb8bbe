"""Verification suites: (case x parameter grid x ensemble) -> report.

Work is split into units, one per ensemble specification (family, size,
seed).  A unit draws its matrices, builds one :class:`Quantities` cache and
evaluates every case on it, returning plain aggregate dictionaries.  Units run
sequentially or in a process pool; the report is assembled by sorted keys, so
its content does not depend on the number of workers or their scheduling.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    CATALOGUE,
    BoundCase,
    CaseError,
    Quantities,
    SUITE_GRID,
    Tolerance,
    default_grid,
    evaluate_batch,
    evaluate_vector_batch,
    expand_grid,
    normalization,
)
from .ensembles import EnsembleSpec, generate_batch, random_vectors
from .linalg import adjoint

SCHEMA = 1
# vectors drawn per matrix for the vector lemmas: x, y, e, then x_1 ... x_16
VECTORS_PER_DRAW = 19
# violation records kept per (case, ensemble)
MAX_WITNESSES = 10

CSV_COLUMNS = [
    "id",
    "params",
    "n",
    "count",
    "violations",
    "min_ratio",
    "mean_ratio",
    "max_ratio",
    "worst_slack",
    "witness_seed",
    "family",
    "link",
    "witness_index",
    "untestable",
]


class ConfigError(ValueError):
    """Malformed suite configuration or report."""


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class CaseEntry:
    """A case template: identifier, parameter grid and corruption factor."""

    id: str
    grid: dict = field(default_factory=dict)
    corrupt: float = 1.0

    def expand(self) -> list[BoundCase]:
        return expand_grid(self.id, self.grid)

    def to_json(self) -> dict:
        out = {"id": self.id, "grid": self.grid}
        if self.corrupt != 1.0:
            out["corrupt"] = self.corrupt
        return out


@dataclass
class SuiteConfig:
    cases: list[CaseEntry]
    ensembles: list[EnsembleSpec]
    tol: Tolerance = Tolerance()
    radius_grid: int = SUITE_GRID
    jobs: int = 1
    name: str = "suite"

    def expanded_cases(self) -> list[tuple[BoundCase, float]]:
        out = {}
        for entry in self.cases:
            for case in entry.expand():
                out[(case.key, entry.corrupt)] = (case, entry.corrupt)
        return [out[k] for k in sorted(out)]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cases": [c.to_json() for c in self.cases],
            "ensembles": [e.to_json() for e in self.ensembles],
            "tolerance": {"abs": self.tol.abs, "rel": self.tol.rel},
            "radius_grid": self.radius_grid,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteConfig":
        if not isinstance(obj, dict):
            raise ConfigError("suite config must be a JSON object")
        try:
            cases = _parse_cases(obj.get("cases", []))
            ensembles = _parse_ensembles(obj.get("ensembles", []))
            tol_obj = obj.get("tolerance", {})
            tol = Tolerance(float(tol_obj.get("abs", Tolerance.abs)), float(tol_obj.get("rel", Tolerance.rel)))
            grid = int(obj.get("radius_grid", SUITE_GRID))
            jobs = int(obj.get("jobs", 1))
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid suite config: {exc}") from None
        if tol.abs < 0 or tol.rel < 0:
            raise ConfigError("tolerances must be nonnegative")
        config = cls(cases, ensembles, tol, grid, max(1, jobs), str(obj.get("name", "suite")))
        try:
            config.expanded_cases()
        except (CaseError, ValueError) as exc:
            raise ConfigError(f"invalid case in suite config: {exc}") from None
        return config


def _parse_cases(raw) -> list[CaseEntry]:
    if raw == "all":
        return [CaseEntry(cid, default_grid(cid)) for cid in CATALOGUE]
    if not isinstance(raw, list):
        raise ConfigError("'cases' must be a list or \"all\"")
    out = []
    for item in raw:
        if isinstance(item, str):
            item = {"id": item}
        if not isinstance(item, dict) or "id" not in item:
            raise ConfigError(f"bad case entry {item!r}")
        cid = item["id"]
        if cid not in CATALOGUE:
            raise ConfigError(f"unknown case id {cid!r}")
        grid = item.get("grid")
        if grid is None or grid == "default":
            grid = default_grid(cid)
        grid = dict(grid)
        for name, value in (item.get("params") or {}).items():
            grid[name] = [value]
        corrupt = float(item.get("corrupt", 1.0))
        if not (math.isfinite(corrupt) and corrupt > 0):
            raise ConfigError("corrupt must be a positive number")
        out.append(CaseEntry(cid, {k: list(v) if isinstance(v, (list, tuple)) else [v] for k, v in grid.items()}, corrupt))
    return out


def _parse_ensembles(raw) -> list[EnsembleSpec]:
    if not isinstance(raw, list):
        raise ConfigError("'ensembles' must be a list")
    out = []
    for item in raw:
        if not isinstance(item, dict):
            raise ConfigError(f"bad ensemble entry {item!r}")
        sizes = item.get("n")
        sizes = sizes if isinstance(sizes, list) else [sizes]
        for n in sizes:
            try:
                out.append(EnsembleSpec.from_json(dict(item, n=n)))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad ensemble {item!r}: {exc}") from None
    return out


def load_config(path) -> SuiteConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read suite config {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return SuiteConfig.from_json(obj)


def bundled_config(name: str = "default_suite") -> SuiteConfig:
    """A suite shipped with the package (``default_suite``, ``selftest_corrupted``)."""
    text = resources.files("orlicz_radius").joinpath("data", f"{name}.json").read_text()
    return SuiteConfig.from_json(json.loads(text))


# -- draws -----------------------------------------------------------------------


def vector_inputs(case: BoundCase, T: np.ndarray, vecs: np.ndarray, scale: np.ndarray) -> dict:
    """Lemma inputs derived from draws ``T`` (m, n, n) and vectors (m, k, n)."""
    e = vecs[:, 2] / np.linalg.norm(vecs[:, 2], axis=1, keepdims=True)
    Tc = T * scale[:, None, None]
    return {
        "x": vecs[:, 0],
        "y": vecs[:, 1],
        "e": e,
        "xs": vecs[:, 3:],
        "T": T,
        "A": adjoint(Tc) @ Tc,
    }


def draw_vectors(spec: EnsembleSpec, indices) -> np.ndarray:
    return np.stack([random_vectors(spec, i, VECTORS_PER_DRAW) for i in indices]) if len(indices) else np.zeros(
        (0, VECTORS_PER_DRAW, spec.n), dtype=complex
    )


# -- aggregation -------------------------------------------------------------------


def _num(x):
    """JSON-safe float (``None`` for NaN, strings for infinities)."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _aggregate(batch, corrupt: float, spec: EnsembleSpec) -> dict:
    case = batch.case
    tested = (batch.status == "pass") | (batch.status == "fail")
    ratios = batch.ratios()
    links = []
    for j in range(len(batch.names) - 1):
        entry = {"link": f"{batch.names[j]} <= {batch.names[j + 1]}", "index": j}
        r = ratios[:, j]
        ok = tested & np.isfinite(r)
        if np.any(ok):
            idx = np.flatnonzero(ok)
            vals = r[idx]
            entry.update(
                min_ratio=_num(vals.min()),
                mean_ratio=_num(vals.mean()),
                max_ratio=_num(vals.max()),
                min_witness=int(idx[np.argmin(vals)]),
                max_witness=int(idx[np.argmax(vals)]),
            )
        else:
            entry.update(min_ratio=None, mean_ratio=None, max_ratio=None, min_witness=None, max_witness=None)
        sl = batch.slack[:, j]
        okk = tested & np.isfinite(sl)
        if np.any(okk):
            idx = np.flatnonzero(okk)
            k = idx[np.argmin(sl[idx])]
            entry.update(worst_slack=_num(sl[k]), slack_witness=int(k))
        else:
            entry.update(worst_slack=None, slack_witness=None)
        entry["failures"] = int(np.sum(tested & ~batch.passed[:, j]))
        entry["grazes"] = int(np.sum(tested & batch.grazes()[:, j]))
        links.append(entry)

    worst = [(l["worst_slack"], l["slack_witness"], l["index"]) for l in links if l["worst_slack"] is not None]
    worst_slack, worst_witness, worst_link = min(worst) if worst else (None, None, None)

    witnesses = []
    for i in np.flatnonzero(batch.status == "fail")[:MAX_WITNESSES]:
        bad = np.flatnonzero(~batch.passed[i])
        j = int(bad[0])
        witnesses.append(
            {
                "index": int(i),
                "link": j,
                "lhs": _num(batch.values[i, j]),
                "rhs": _num(batch.values[i, j + 1]),
                "slack": _num(batch.slack[i, j]),
                "scale": _num(batch.scale[i]),
            }
        )

    diagnostics = {}
    for name, arr in sorted(batch.diagnostics.items()):
        arr = np.asarray(arr, dtype=float)[tested]
        arr = arr[np.isfinite(arr)]
        diagnostics[name] = (
            {"min": _num(arr.min()), "mean": _num(arr.mean()), "max": _num(arr.max())}
            if arr.size
            else {"min": None, "mean": None, "max": None}
        )

    return {
        "case": case.key,
        "id": case.id,
        "params": {k: (v if isinstance(v, str) else _num(v)) for k, v in case.params().items()},
        "corrupt": corrupt,
        "ensemble": spec.to_json(),
        "label": spec.label,
        "evaluations": int(batch.size),
        "passed": batch.count("pass"),
        "violations": batch.count("fail"),
        "untestable": batch.count("untestable"),
        "inapplicable": batch.count("inapplicable"),
        "grazes": int(np.sum(np.any(batch.grazes(), axis=1) & tested)),
        "normalized": int(np.sum(batch.scale != 1.0)),
        "chain": list(batch.names),
        "links": links,
        "worst_slack": worst_slack,
        "worst_slack_witness": None
        if worst_witness is None
        else {"seed": spec.seed, "index": worst_witness, "link": worst_link},
        "violation_witnesses": witnesses,
        "diagnostics": diagnostics,
    }


def evaluate_unit(spec: EnsembleSpec, cases, tol: Tolerance, radius_grid: int) -> list[dict]:
    """Evaluate ``cases`` (pairs ``(BoundCase, corrupt)``) on one ensemble."""
    indices = list(range(spec.count))
    T = generate_batch(spec)
    need_pair = any(c.info.pair for c, _ in cases)
    need_vec = any(c.info.kind == "vector" for c, _ in cases)
    S = generate_batch(spec.paired()) if need_pair else None
    vecs = draw_vectors(spec, indices) if need_vec else None
    q = Quantities(T, S, grid=radius_grid)
    results = []
    for case, corrupt in cases:
        if case.info.kind == "vector":
            scale = normalization(case, q.norm())
            batch = evaluate_vector_batch(case, vector_inputs(case, T, vecs, scale), tol, corrupt)
            batch.scale = scale
        else:
            batch = evaluate_batch(case, q, tol, corrupt)
        results.append(_aggregate(batch, corrupt, spec))
    return results


def _unit_worker(payload) -> list[dict]:
    config_json, spec_json = payload
    config = SuiteConfig.from_json(config_json)
    spec = EnsembleSpec.from_json(spec_json)
    return evaluate_unit(spec, config.expanded_cases(), config.tol, config.radius_grid)


# -- report ---------------------------------------------------------------------


def _sort_key(r: dict):
    e = r["ensemble"]
    return (r["case"], r["corrupt"], e["family"], json.dumps(e["params"], sort_keys=True), e["n"], e["seed"], e["count"])


@dataclass
class SuiteReport:
    """Aggregated suite results (a thin wrapper over the JSON document)."""

    data: dict

    @property
    def results(self) -> list[dict]:
        return self.data["results"]

    @property
    def summary(self) -> dict:
        return self.data["summary"]

    @property
    def violations(self) -> int:
        return int(self.summary["violations"])

    def to_json(self) -> dict:
        return self.data

    def dumps(self, include_wall_time: bool = True) -> str:
        data = dict(self.data)
        if not include_wall_time:
            data.pop("wall_time", None)
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    def reproductions(self) -> list[dict]:
        """``(case, ensemble, index)`` tuples for every recorded violation."""
        out = []
        for r in self.results:
            for w in r["violation_witnesses"]:
                out.append({"case": r["case"], "corrupt": r["corrupt"], "ensemble": r["ensemble"], **w})
        return out


def _summarize(results: list[dict]) -> dict:
    keys = ("evaluations", "passed", "violations", "untestable", "inapplicable", "grazes")
    out = {k: int(sum(r[k] for r in results)) for k in keys}
    out["cases"] = len({(r["case"], r["corrupt"]) for r in results})
    out["units"] = len({json.dumps(r["ensemble"], sort_keys=True) for r in results})
    return out


def run_suite(config: SuiteConfig, jobs: int | None = None, progress=None) -> SuiteReport:
    """Evaluate every case of ``config`` on every ensemble.

    Parameters
    ----------
    config : SuiteConfig
    jobs : int, optional
        Worker processes (defaults to ``config.jobs``).  The report does not
        depend on this value.
    progress : callable, optional
        Called with ``(done, total)`` after each unit.
    """
    start = time.perf_counter()
    jobs = max(1, int(jobs if jobs is not None else config.jobs))
    cases = config.expanded_cases()
    results: list[dict] = []
    specs = sorted(config.ensembles, key=lambda s: json.dumps(s.to_json(), sort_keys=True))
    if cases and specs:
        if jobs == 1 or len(specs) == 1:
            for k, spec in enumerate(specs):
                results.extend(evaluate_unit(spec, cases, config.tol, config.radius_grid))
                if progress:
                    progress(k + 1, len(specs))
        else:
            payloads = [(config.to_json(), s.to_json()) for s in specs]
            ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")
            with ctx.Pool(min(jobs, len(specs))) as pool:
                for k, chunk in enumerate(pool.imap_unordered(_unit_worker, payloads)):
                    results.extend(chunk)
                    if progress:
                        progress(k + 1, len(specs))
    results.sort(key=_sort_key)
    data = {
        "schema": SCHEMA,
        "version": __version__,
        "config": config.to_json(),
        "summary": _summarize(results),
        "results": results,
        "wall_time": time.perf_counter() - start,
    }
    return SuiteReport(data)


def tightness_stats(report: SuiteReport, case: str) -> list[dict]:
    """Per-link ratio statistics for ``case`` (an id or a full case key)."""
    rows = []
    for r in report.results:
        if case not in (r["id"], r["case"]):
            continue
        for link in r["links"]:
            rows.append(
                {
                    "case": r["case"],
                    "ensemble": r["label"],
                    "n": r["ensemble"]["n"],
                    "link": link["link"],
                    "min_ratio": link["min_ratio"],
                    "mean_ratio": link["mean_ratio"],
                    "max_ratio": link["max_ratio"],
                    "witness": None
                    if link["max_witness"] is None
                    else {"seed": r["ensemble"]["seed"], "index": link["max_witness"]},
                }
            )
    if not rows and not any(case in (r["id"], r["case"]) for r in report.results):
        raise KeyError(f"case {case!r} not present in report")
    return rows


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def csv_rows(report: SuiteReport) -> list[list]:
    rows = []
    for r in report.results:
        params = _params_text(r["params"])
        if r["corrupt"] != 1.0:
            params = f"{params};corrupt={r['corrupt']}" if params else f"corrupt={r['corrupt']}"
        for link in r["links"]:
            rows.append(
                [
                    r["id"],
                    params,
                    r["ensemble"]["n"],
                    r["evaluations"],
                    link["failures"],
                    link["min_ratio"],
                    link["mean_ratio"],
                    link["max_ratio"],
                    link["worst_slack"],
                    r["ensemble"]["seed"],
                    r["label"],
                    link["link"],
                    link["max_witness"],
                    r["untestable"],
                ]
            )
    return rows


def export_report(report: SuiteReport, fmt: str, path) -> None:
    """Write ``report`` as ``"json"`` (full document) or ``"csv"`` (one row per link)."""
    path = Path(path)
    if fmt == "json":
        path.write_text(report.dumps())
    elif fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in csv_rows(report):
                writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def load_report(path) -> SuiteReport:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load report {path}: {exc}") from None
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ConfigError(f"{path}: not a schema-{SCHEMA} report")
    return SuiteReport(data)
