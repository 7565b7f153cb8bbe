"""Scalar Orlicz functions: evaluation, inversion and axiom checks.

An Orlicz function is continuous, convex and increasing on ``[0, inf)`` with
``phi(0) = 0``, ``phi(t) > 0`` for ``t > 0`` and ``phi(t) -> inf``.  The four
registered kinds are ``t**p`` (``p >= 1``), ``e**t - 1``, ``t**p log(1 + t)``
(``p > 0``) and ``e**(t**2) - 1``; tabulated functions cover anything else.

Exponential kinds refuse to evaluate past their overflow boundary instead of
returning ``inf``, so an inequality can never "pass" by comparing infinities.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

EXPM1_LIMIT = 700.0
EXPSQ_LIMIT = 26.0
CONVEXITY_SLACK = 1e-12
SUBMULT_RTOL = 1e-12

KINDS = ("power", "exp_minus_one", "power_log", "exp_square_minus_one", "custom")


class OrliczDomainError(ValueError):
    """Argument outside the domain on which a function can be evaluated."""


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


@dataclass(frozen=True)
class SubmultStatus:
    """Sub-multiplicativity knowledge attached to an :class:`OrliczFn`.

    ``state`` is one of ``"exact"``, ``"checked"`` (on ``[lo, hi]``),
    ``"unchecked"`` or ``"fails"`` (with a witness pair).
    """

    state: str = "unchecked"
    lo: float | None = None
    hi: float | None = None
    witness: tuple[float, float] | None = None

    @property
    def admissible(self) -> bool:
        return self.state in ("exact", "checked")

    def covers(self, magnitude: float) -> bool:
        if self.state == "exact":
            return True
        return self.state == "checked" and self.hi is not None and magnitude <= self.hi

    def describe(self) -> str:
        if self.state == "checked":
            return f"checked[{_fmt(self.lo)},{_fmt(self.hi)}]"
        if self.state == "fails":
            return f"fails({_fmt(self.witness[0])},{_fmt(self.witness[1])})"
        return self.state


@dataclass(frozen=True, eq=False)
class OrliczFn:
    kind: str
    params: tuple[float, ...] = ()
    submult: SubmultStatus = field(default_factory=SubmultStatus)
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    label: str | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Orlicz kind {self.kind!r}")
        if self.kind == "power" and not (len(self.params) == 1 and self.params[0] >= 1):
            raise ValueError("power(p) needs p >= 1")
        if self.kind == "power_log" and not (len(self.params) == 1 and self.params[0] > 0):
            raise ValueError("power_log(p) needs p > 0")
        if self.kind == "custom" and (self.table is None) == (self.func is None):
            raise ValueError("custom functions need exactly one of a table or a callable")

    # -- identity ---------------------------------------------------------

    @property
    def name(self) -> str:
        if self.kind == "power":
            return f"power:p={_fmt(self.params[0])}"
        if self.kind == "power_log":
            return f"powerlog:p={_fmt(self.params[0])}"
        if self.kind == "exp_minus_one":
            return "expm1"
        if self.kind == "exp_square_minus_one":
            return "expsq"
        prefix = "table" if self.table is not None else "custom"
        return f"{prefix}:{self.label or 'anonymous'}"

    def __repr__(self) -> str:
        return f"OrliczFn({self.name}, submult={self.submult.describe()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrliczFn):
            return NotImplemented
        if self.func is not None or other.func is not None:
            return self is other
        return (self.kind, self.params, self.table) == (other.kind, other.params, other.table)

    def __hash__(self) -> int:
        return hash((self.kind, self.params, self.table, id(self.func) if self.func else 0))

    @property
    def is_exponential(self) -> bool:
        return self.kind in ("exp_minus_one", "exp_square_minus_one")

    @property
    def limit(self) -> float:
        """Largest argument that can be evaluated (``inf`` if unbounded)."""
        if self.kind == "exp_minus_one":
            return EXPM1_LIMIT
        if self.kind == "exp_square_minus_one":
            return EXPSQ_LIMIT
        if self.table is not None:
            return self.table[0][-1]
        return np.inf

    def with_submult(self, status: SubmultStatus) -> "OrliczFn":
        return replace(self, submult=status)

    # -- evaluation -------------------------------------------------------

    def _raw(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return np.power(t, self.params[0])
        if self.kind == "exp_minus_one":
            return np.expm1(t)
        if self.kind == "power_log":
            return np.power(t, self.params[0]) * np.log1p(t)
        if self.kind == "exp_square_minus_one":
            return np.expm1(t * t)
        if self.table is not None:
            return np.interp(t, self.table[0], self.table[1])
        return np.asarray(self.func(t), dtype=float)

    def masked(self, t) -> np.ndarray:
        """Vectorised evaluation; entries outside the domain become NaN."""
        t = np.asarray(t, dtype=float)
        bad = ~np.isfinite(t) | (t < 0) | (t > self.limit)
        safe = np.where(bad, 0.0, t)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(self._raw(safe), dtype=float)
        return np.where(bad | ~np.isfinite(out), np.nan, out)

    def __call__(self, t):
        """Evaluate ``phi(t)``; raises :class:`OrliczDomainError` off-domain."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise OrliczDomainError(f"{self.name}: argument must be finite and >= 0")
        if np.any(arr > self.limit):
            raise OrliczDomainError(
                f"{self.name}: argument {float(np.max(arr)):.6g} beyond evaluation limit {self.limit:g}"
            )
        out = self.masked(arr)
        if np.any(np.isnan(out)):
            raise OrliczDomainError(f"{self.name}: evaluation overflowed")
        return float(out) if out.ndim == 0 else out

    eval = __call__


# -- constructors -----------------------------------------------------------


def power(p: float) -> OrliczFn:
    # (t1 t2)^p = t1^p t2^p identically
    return OrliczFn("power", (float(p),), SubmultStatus("exact"))


def exp_minus_one() -> OrliczFn:
    return OrliczFn("exp_minus_one")


def power_log(p: float) -> OrliczFn:
    return OrliczFn("power_log", (float(p),))


def exp_square_minus_one() -> OrliczFn:
    return OrliczFn("exp_square_minus_one")


def from_table(ts, ys, label: str | None = None) -> OrliczFn:
    """Piecewise-linear function through ``(ts[i], ys[i])``.

    The abscissae must start at 0 and increase strictly; evaluation beyond
    ``ts[-1]`` is an error.  Piecewise-linear interpolation preserves the
    convexity of convex data.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ts.ndim != 1 or ts.shape != ys.shape or ts.size < 2:
        raise ValueError("table needs two equal-length columns with at least 2 rows")
    if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
        raise ValueError("table abscissae must start at 0 and increase strictly")
    if not (np.all(np.isfinite(ys)) and np.all(np.isfinite(ts))):
        raise ValueError("table entries must be finite")
    return OrliczFn("custom", table=(tuple(ts.tolist()), tuple(ys.tolist())), label=label)


def from_callable(f: Callable[[np.ndarray], np.ndarray], label: str) -> OrliczFn:
    """Wrap an arbitrary vectorised function (used for probes such as ``sqrt``)."""
    return OrliczFn("custom", func=f, label=label)


def load_table(path) -> OrliczFn:
    path = Path(path)
    rows = []
    try:
        with path.open(newline="") as fh:
            seen = 0
            for row in csv.reader(fh):
                if not row or not row[0].strip():
                    continue
                seen += 1
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if seen > 1:
                        raise ValueError(f"{path}: bad row {row!r}") from None
                    # header line
    except OSError as exc:
        raise ValueError(f"cannot read table {path}: {exc}") from None
    ts, ys = zip(*rows) if rows else ((), ())
    return from_table(ts, ys, label=str(path))


def parse_phi(text: str) -> OrliczFn:
    """Parse the command-line syntax ``power:p=2``, ``expm1``, ``powerlog:p=1``,
    ``expsq`` or ``table:file.csv``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    if kind in ("table",):
        if not rest:
            raise ValueError("table: needs a file path")
        return load_table(rest)
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"bad parameter {item!r} in {text!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValueError(f"bad parameter value {item!r} in {text!r}") from None
    if kind in ("power", "powerlog", "power_log"):
        if set(params) != {"p"}:
            raise ValueError(f"{kind} needs exactly one parameter p, got {text!r}")
        return power(params["p"]) if kind == "power" else power_log(params["p"])
    if params:
        raise ValueError(f"{kind} takes no parameters")
    if kind in ("expm1", "exp_minus_one"):
        return exp_minus_one()
    if kind in ("expsq", "exp_square_minus_one"):
        return exp_square_minus_one()
    raise ValueError(f"unknown Orlicz function {text!r}")


def registered() -> list[OrliczFn]:
    """The default functions exercised by the verification suite."""
    return [power(1), power(1.5), power(2), exp_minus_one(), power_log(1), exp_square_minus_one()]


# -- inversion ----------------------------------------------------------------


def inverse(phi: OrliczFn, y, tol: float = 1e-12):
    """Solve ``phi(t) = y`` for ``t >= 0`` by bracketing and bisection.

    Bisection runs to full double precision in ``t``; the result satisfies
    ``|phi(t) - y| <= tol * max(1, y)``.  Accepts scalars or arrays.
    """
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y_arr < 0) or not np.all(np.isfinite(y_arr)):
        raise OrliczDomainError("inverse: y must be finite and >= 0")
    limit = phi.limit
    cap = phi(limit) if np.isfinite(limit) else np.inf
    if np.any(y_arr > cap):
        raise OrliczDomainError(f"{phi.name}: y exceeds phi at the evaluation limit")
    lo = np.zeros_like(y_arr)
    hi = np.ones_like(y_arr)
    if np.isfinite(limit):
        hi = np.minimum(hi, limit)
    for _ in range(2100):
        short = phi.masked(hi) < y_arr
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, np.minimum(2.0 * hi, limit), hi)
    for _ in range(2200):
        mid = 0.5 * (lo + hi)
        active = (hi - lo) > 2.0 * np.finfo(float).eps * hi
        if not np.any(active):
            break
        below = phi.masked(mid) < y_arr
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    f_lo = phi.masked(lo)
    f_hi = phi.masked(hi)
    t = np.where(np.abs(f_lo - y_arr) <= np.abs(f_hi - y_arr), lo, hi)
    t = np.where(y_arr == 0, 0.0, t)
    resid = np.abs(phi.masked(t) - y_arr)
    if np.any(resid > tol * np.maximum(1.0, y_arr)):
        raise OrliczDomainError(f"{phi.name}: inverse did not reach tolerance {tol:g}")
    return float(t[0]) if np.ndim(y) == 0 else t


# -- axioms -------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResult:
    passed: bool
    witness: tuple[float, ...] | None = None


@dataclass(frozen=True)
class AxiomReport:
    phi: str
    results: dict[str, AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failed(self) -> list[str]:
        return [name for name, r in self.results.items() if not r.passed]


def default_axiom_grid() -> np.ndarray:
    return np.linspace(0.0, 10.0, 101)


def check_axioms(phi: OrliczFn, grid=None) -> AxiomReport:
    """Check the defining conditions of an Orlicz function on a grid.

    Reports ``zero_at_origin``, ``positive``, ``increasing``, ``convex``
    (midpoint test over all grid pairs) and ``unbounded`` (monotone growth with
    a positive final slope), each with the first violating point or pair.
    """
    g = default_axiom_grid() if grid is None else np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 8 or np.any(np.diff(g) < 0) or g[0] > 0 or g[-1] < 10:
        raise ValueError("grid must be sorted, have >= 8 points and span [0, 10]")
    f = phi.masked(g)
    results: dict[str, AxiomResult] = {}

    results["zero_at_origin"] = AxiomResult(bool(f[0] == 0.0), None if f[0] == 0.0 else (float(g[0]),))

    pos_bad = np.flatnonzero((g > 0) & ~(f > 0))
    results["positive"] = AxiomResult(pos_bad.size == 0, (float(g[pos_bad[0]]),) if pos_bad.size else None)

    inc_bad = np.flatnonzero(~(np.diff(f) > 0))
    results["increasing"] = AxiomResult(
        inc_bad.size == 0,
        (float(g[inc_bad[0]]), float(g[inc_bad[0] + 1])) if inc_bad.size else None,
    )

    i, j = np.triu_indices(g.size, k=1)
    mid = phi.masked(0.5 * (g[i] + g[j]))
    bound = 0.5 * (f[i] + f[j]) + CONVEXITY_SLACK * np.maximum(1.0, f[j])
    conv_bad = np.flatnonzero(~(mid <= bound))
    results["convex"] = AxiomResult(
        conv_bad.size == 0,
        (float(g[i[conv_bad[0]]]), float(g[j[conv_bad[0]]])) if conv_bad.size else None,
    )

    final_slope = (f[-1] - f[-2]) / (g[-1] - g[-2])
    grows = inc_bad.size == 0 and bool(final_slope > 0)
    results["unbounded"] = AxiomResult(grows, None if grows else (float(g[-2]), float(g[-1])))
    return AxiomReport(phi.name, results)


@dataclass(frozen=True)
class SubmultResult:
    """Outcome of :func:`check_submultiplicative`.

    ``status`` is ``"exact"``, ``"pass"`` or ``"fail"``.  For ``fail`` the
    witness is ``(t1, t2, phi(t1 t2), phi(t1) phi(t2))`` at the worst ratio.
    """

    status: str
    lo: float | None = None
    hi: float | None = None
    witness: tuple[float, float, float, float] | None = None
    untestable: int = 0

    def as_status(self) -> SubmultStatus:
        if self.status == "exact":
            return SubmultStatus("exact")
        if self.status == "pass":
            return SubmultStatus("checked", self.lo, self.hi)
        return SubmultStatus("fails", witness=self.witness[:2])


def default_submult_grid() -> np.ndarray:
    return 0.25 * np.arange(1, 13)


def check_submultiplicative(phi: OrliczFn, grid=None) -> SubmultResult:
    """Test ``phi(t1 t2) <= phi(t1) phi(t2)`` on the grid product lattice.

    Power functions are reported ``exact`` without sampling.  Pairs whose
    product overflows the function are counted as untestable, not failures.
    """
    if phi.kind == "power":
        return SubmultResult("exact")
    g = default_submult_grid() if grid is None else np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0):
        raise ValueError("sub-multiplicativity grid must hold positive values")
    i, j = np.triu_indices(g.size)
    t1, t2 = g[i], g[j]
    lhs = phi.masked(t1 * t2)
    rhs = phi.masked(t1) * phi.masked(t2)
    testable = np.isfinite(lhs) & np.isfinite(rhs)
    bad = testable & (lhs > rhs * (1.0 + SUBMULT_RTOL))
    lo, hi = float(g.min()), float(g.max())
    untestable = int(np.count_nonzero(~testable))
    if not np.any(bad):
        return SubmultResult("pass", lo, hi, untestable=untestable)
    with np.errstate(divide="ignore"):
        ratio = np.where(bad, lhs / np.where(rhs > 0, rhs, np.nan), -np.inf)
    ratio = np.where(bad & (rhs == 0), np.inf, ratio)
    k = int(np.argmax(ratio))
    return SubmultResult(
        "fail", lo, hi, (float(t1[k]), float(t2[k]), float(lhs[k]), float(rhs[k])), untestable
    )
