"""Turning chain values into verdicts.

A chain ``c_0 <= c_1 <= ... <= c_L`` passes link ``i`` when

    c_i <= c_{i+1} + tol_abs + tol_rel * max(1, |c_{i+1}|).

A link with negative slack that still passes is a *graze*.  Draws with a
non-finite chain member (an Orlicz function evaluated past its limit) are
*untestable*; draws outside a case's hypotheses (e.g. ``T^n != 0`` for the
nilpotent bound) are *inapplicable*.  Neither counts as pass or fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..linalg import check_matrix
from ..numrad import DEFAULT_TOL
from .catalogue import BoundCase
from .chains import CHAINS, ChainValues
from .quantities import SUITE_GRID, Quantities
from .vectors import vector_chain

DEFAULT_TOL_ABS = 1e-7
DEFAULT_TOL_REL = 1e-7

# exponential functions are evaluated on c*T with ||cT|| <= cap, where the
# cap keeps phi(||cT||^5) finite (degree 5 is the largest used by default)
MAX_DEGREE = 5
NORM_CAP = 4.0

STATUSES = ("pass", "fail", "untestable", "inapplicable")


def norm_cap(phi) -> float:
    if phi is None or not np.isfinite(phi.limit):
        return np.inf
    return min(NORM_CAP, (0.9 * phi.limit) ** (1.0 / MAX_DEGREE))


def needs_normalization(case: BoundCase) -> bool:
    """Whether ``case`` evaluates an exponential function in its own scale."""
    phi = case.phi
    if phi is None or not phi.is_exponential:
        return False
    if case.id == "orlicz_buzano_vec":
        return False  # evaluated in logarithmic form
    if case.id == "power_norm" and phi.kind == "exp_minus_one":
        return False
    return True


def normalization(case: BoundCase, norms) -> np.ndarray:
    """Per-draw factors ``c = min(1, cap/||T||)`` (all ones if not needed)."""
    norms = np.asarray(norms, dtype=float)
    if not needs_normalization(case):
        return np.ones_like(norms)
    cap = norm_cap(case.phi)
    with np.errstate(divide="ignore"):
        return np.where(norms > cap, cap / np.where(norms > 0, norms, 1.0), 1.0)


@dataclass(frozen=True)
class Tolerance:
    abs: float = DEFAULT_TOL_ABS
    rel: float = DEFAULT_TOL_REL

    def allowance(self, rhs):
        return self.abs + self.rel * np.maximum(1.0, np.abs(rhs))


def link_ratios(values: np.ndarray) -> np.ndarray:
    """``LHS/RHS`` per link; ``0/0`` counts as 1 and ``x/0`` (x > 0) as inf."""
    lhs, rhs = values[..., :-1], values[..., 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lhs / rhs
    ratio = np.where((rhs == 0) & (lhs == 0), 1.0, ratio)
    return np.where((rhs == 0) & (lhs > 0), np.inf, ratio)


@dataclass
class BoundEvaluation:
    """Chain values and verdicts for one case on one input."""

    case: BoundCase
    inputs: dict
    names: list[str]
    chain: list[float]
    slack: list[float]
    passed: list[bool]
    status: str
    tol_abs: float
    tol_rel: float
    quantities: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    @property
    def ratios(self) -> list[float]:
        return [float(r) for r in link_ratios(np.asarray(self.chain))]

    @property
    def grazes(self) -> list[bool]:
        return [p and s < 0 for p, s in zip(self.passed, self.slack)]

    def to_json(self) -> dict:
        return {
            "case": self.case.key,
            "inputs": self.inputs,
            "status": self.status,
            "chain": [{"name": n, "value": v} for n, v in zip(self.names, self.chain)],
            "slack": self.slack,
            "pass": self.passed,
            "ratios": self.ratios,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "quantities": self.quantities,
            "diagnostics": self.diagnostics,
        }


@dataclass
class BatchEvaluation:
    """Evaluations of one case over a batch of draws."""

    case: BoundCase
    names: list[str]
    values: np.ndarray  # (m, L)
    slack: np.ndarray  # (m, L-1)
    passed: np.ndarray  # (m, L-1) bool
    status: np.ndarray  # (m,) str
    tol: Tolerance
    scale: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    quantities: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def ratios(self) -> np.ndarray:
        return link_ratios(self.values)

    def grazes(self) -> np.ndarray:
        return self.passed & (self.slack < 0)

    def count(self, status: str) -> int:
        return int(np.sum(self.status == status))

    def row(self, i: int, inputs: dict | None = None) -> BoundEvaluation:
        return BoundEvaluation(
            case=self.case,
            inputs=dict(inputs or {}, scale=float(self.scale[i])),
            names=list(self.names),
            chain=[float(v) for v in self.values[i]],
            slack=[float(v) for v in self.slack[i]],
            passed=[bool(v) for v in self.passed[i]],
            status=str(self.status[i]),
            tol_abs=self.tol.abs,
            tol_rel=self.tol.rel,
            quantities={k: float(v[i]) for k, v in self.quantities.items()},
            diagnostics={k: float(v[i]) for k, v in self.diagnostics.items()},
        )


def judge(case: BoundCase, chain: ChainValues, tol: Tolerance, scale, corrupt: float = 1.0, quantities=None) -> BatchEvaluation:
    values = np.array(chain.values, dtype=float)
    if corrupt != 1.0:
        values[:, -1] = values[:, -1] * corrupt
    lhs, rhs = values[:, :-1], values[:, 1:]
    finite = np.all(np.isfinite(values), axis=1)
    with np.errstate(invalid="ignore"):
        slack = rhs - lhs
        passed = lhs <= rhs + tol.allowance(rhs)
    passed &= finite[:, None]
    applicable = np.ones(values.shape[0], dtype=bool) if chain.applicable is None else np.asarray(chain.applicable, dtype=bool)
    status = np.where(
        ~applicable,
        "inapplicable",
        np.where(~finite, "untestable", np.where(np.all(passed, axis=1), "pass", "fail")),
    )
    return BatchEvaluation(
        case=case,
        names=list(chain.names),
        values=values,
        slack=slack,
        passed=passed,
        status=status.astype(object).astype(str),
        tol=tol,
        scale=np.asarray(scale, dtype=float),
        diagnostics=dict(chain.diagnostics),
        quantities=dict(quantities or {}),
    )


def evaluate_batch(
    case: BoundCase,
    q: Quantities,
    tol: Tolerance = Tolerance(),
    corrupt: float = 1.0,
    normalize: bool = True,
) -> BatchEvaluation:
    """Evaluate an operator case on every draw held by ``q``.

    With ``normalize`` (default) exponential functions are applied to
    ``c*T`` with the factors of :func:`normalization`.
    """
    if case.info.kind != "operator":
        raise ValueError(f"{case.id} is a vector lemma; use evaluate_vector_batch")
    if case.info.pair and not q.has_pair:
        raise ValueError(f"{case.id} needs a second operator S")
    scale = normalization(case, q.norm()) if normalize else np.ones(q.size)
    view = q.scaled(scale) if np.any(scale != 1.0) else q
    chain = CHAINS[case.id](case, view)
    return judge(case, chain, tol, scale, corrupt, view.recorded())


def evaluate_vector_batch(case: BoundCase, inputs: dict, tol: Tolerance = Tolerance(), corrupt: float = 1.0) -> BatchEvaluation:
    if case.info.kind != "vector":
        raise ValueError(f"{case.id} is not a vector lemma")
    chain = vector_chain(case, inputs)
    return judge(case, chain, tol, np.ones(chain.values.shape[0]), corrupt)


def evaluate_bound(
    case: BoundCase,
    T,
    S=None,
    *,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    grid: int = SUITE_GRID,
    radius_tol: float = DEFAULT_TOL,
    normalize: bool = True,
    corrupt: float = 1.0,
    inputs: dict | None = None,
) -> BoundEvaluation:
    """Evaluate one catalogue case on ``T`` (and ``S`` for two-operator cases).

    Parameters
    ----------
    case : BoundCase
        An operator case (vector lemmas go through :func:`check_vector_lemma`).
    T, S : array_like
        Input matrices; ``S`` is required exactly for two-operator cases.
    normalize : bool
        Rescale ``T`` to the exponential norm cap when ``case.phi`` is
        exponential (see :func:`normalization`).
    corrupt : float
        Factor applied to the outermost right-hand side (harness self-test).

    Returns
    -------
    BoundEvaluation
    """
    T = check_matrix(T, "T")
    if case.info.pair != (S is not None):
        raise ValueError(f"{case.id}: S must be given {'' if case.info.pair else 'only '}for two-operator cases")
    if S is not None:
        S = check_matrix(S, "S")
        if S.shape != T.shape:
            raise ValueError("T and S must have the same dimension")
    q = Quantities(T, S, grid=grid, tol=radius_tol)
    batch = evaluate_batch(case, q, Tolerance(tol_abs, tol_rel), corrupt, normalize)
    return batch.row(0, inputs)


def check_vector_lemma(
    kind: str | BoundCase,
    *,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    **inputs_and_params,
) -> BoundEvaluation:
    """Evaluate a vector lemma on concrete vectors.

    ``kind`` is a lemma id (``"buzano_vec"``...) or a :class:`BoundCase`.
    Keyword arguments are the inputs ``x``, ``y``, ``e``, ``A``, ``T``,
    ``xs`` and, when ``kind`` is an id, the lemma's parameters.

    >>> check_vector_lemma("buzano_vec", x=[1, 0], y=[1, 0], e=[1, 0]).chain
    [1.0, 1.0]
    """
    input_keys = ("x", "y", "e", "A", "T", "xs")
    inputs = {k: inputs_and_params.pop(k) for k in input_keys if k in inputs_and_params}
    if isinstance(kind, BoundCase):
        if inputs_and_params:
            raise TypeError(f"unexpected arguments {sorted(inputs_and_params)}")
        case = kind
    else:
        case = BoundCase(kind, **inputs_and_params)
    batch = evaluate_vector_batch(case, inputs, Tolerance(tol_abs, tol_rel))
    return batch.row(0)
