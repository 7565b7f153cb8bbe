"""Chain builders for the operator inequalities.

Each builder maps ``(case, quantities)`` to a :class:`ChainValues`: named
members ordered from the left-hand side to the outermost right-hand side,
evaluated for every draw of the batch.  Orlicz functions are applied with
:meth:`OrliczFn.masked`, so an argument beyond a function's evaluation limit
shows up as NaN and is later classified as untestable.

Exponential specialisations are written in logarithmic form, e.g.
``log(e^a/2 + e^b/2)``, which never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..orlicz import power
from .catalogue import BoundCase
from .quantities import Quantities

_IDENTITY = power(1.0)


@dataclass
class ChainValues:
    names: list[str]
    values: np.ndarray  # (m, len(names))
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)
    # draws on which the case's hypotheses hold (None: all)
    applicable: np.ndarray | None = None


def _chain(names, *cols, **diagnostics) -> ChainValues:
    values = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    return ChainValues(list(names), values, dict(diagnostics))


def log_mix(a: float, x, y) -> np.ndarray:
    """``log(a e^x + (1 - a) e^y)`` for ``0 <= a <= 1`` without overflow.

    Exact (bitwise) when ``x == y``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore"):
        hi_y = y >= x
        d = np.where(hi_y, x - y, y - x)
        w = np.where(hi_y, a, 1.0 - a)
        return np.where(hi_y, y, x) + np.log1p(w * np.expm1(d))


def log_mean_exp(x, y) -> np.ndarray:
    """``log(e^x/2 + e^y/2)``."""
    return log_mix(0.5, x, y)


# -- baselines ---------------------------------------------------------------


def base_norm(case: BoundCase, q: Quantities) -> ChainValues:
    nt = q.norm()
    return _chain(["||T||/2", "w(T)", "||T||"], nt / 2, q.w(), nt)


def base_kittaneh(case, q):
    rhs = 0.5 * q.psd_norm((1, "T", None, 1), (1, "T*", None, 1))
    return _chain(["w(T)", "||(|T|+|T*|)||/2"], q.w(), rhs)


def base_elhaddad(case, q):
    r = case.r
    rhs = 0.5 * q.psd_norm((1, "T", None, 2 * r), (1, "T*", None, 2 * r))
    return _chain(["w^2r(T)", "||(|T|^2r+|T*|^2r)||/2"], q.w() ** (2 * r), rhs)


def _n2(q, phi=None):
    """``||phi(|T|^2) + phi(|T*|^2)||``."""
    return q.psd_norm((1, "T", phi, 2), (1, "T*", phi, 2))


def base_abuomar(case, q):
    rhs = 0.25 * _n2(q) + 0.5 * q.w(2)
    return _chain(["w^2(T)", "||(|T|^2+|T*|^2)||/4+w(T^2)/2"], q.w() ** 2, rhs)


def base_bhunia(case, q):
    rhs = 0.25 * _n2(q) + 0.5 * q.w_abs_product()
    return _chain(["w^2(T)", "||(|T|^2+|T*|^2)||/4+w(|T||T*|)/2"], q.w() ** 2, rhs)


def dragomir_product(case, q):
    r = case.r
    rhs = 0.5 * q.psd_norm((1, "T", None, 2 * r), (1, "S", None, 2 * r))
    return _chain(["w^r(S*T)", "||(|T|^2r+|S|^2r)||/2"], q.w_adj_product_printed() ** r, rhs)


# -- single operator -----------------------------------------------------------


def power_norm(case, q):
    phi = case.phi
    nt = q.norm()
    root = np.sqrt(q.norm_power(2))
    if phi.kind == "exp_minus_one":
        mid = log_mean_exp(nt, root)
        return _chain(["w(T)", "log(e^||T||/2+e^||T^2||^(1/2)/2)", "||T||"], q.w(), mid, nt)
    P = phi.masked
    mid = 0.5 * (P(nt) + P(root))
    return _chain(["phi(w)", "(phi(||T||)+phi(||T^2||^(1/2)))/2", "phi(||T||)"], P(q.w()), mid, P(nt))


def _th2_rhs(q, phi, v, s):
    P = phi.masked
    c = 1.0 + v
    n4 = q.psd_norm((1, "T", phi, 4 * s), (1, "T*", phi, 4 * (1 - s)))
    n2 = q.psd_norm((1, "T", phi, 2 * s), (1, "T*", phi, 2 * (1 - s)))
    return v / (4 * c) * n4 + v / (2 * c) * P(q.w_gh(s)) + 1 / (2 * c) * P(q.w()) * n2


def th2_gh(case, q):
    phi = case.phi
    chain = _chain(["phi(w^2)", "g/h mixture"], phi.masked(q.w() ** 2), _th2_rhs(q, phi, case.v, case.s))
    chain.applicable = _submult_ok(phi, np.maximum(1.0, q.norm()) ** 2)
    return chain


def cor_22(case, q):
    w = q.w()
    mid = _th2_rhs(q, _IDENTITY, 0.5, 0.5)
    tail = _n2(q) / 6 + w * q.psd_norm((1, "T", None, 1), (1, "T*", None, 1)) / 3
    return _chain(["w^2(T)", "refined", "norm-only tail"], w**2, mid, tail)


def _variant_ops(variant):
    return ("T", "T*") if variant == "A" else ("T*", "T")


def th3_alpha(case, q):
    phi, a = case.phi, case.alpha
    first, second = _variant_ops(case.variant)
    P = phi.masked
    rhs = a / 2 * P(q.w(2)) + q.psd_norm((a / 4, first, phi, 2), (1 - 3 * a / 4, second, phi, 2))
    return _chain(["phi(w^2)", "alpha/2 phi(w(T^2))+||mixture||"], P(q.w() ** 2), rhs)


def th4_gh_alpha(case, q):
    phi, a, s = case.phi, case.alpha, case.s
    first, second = _variant_ops(case.variant)
    P = phi.masked
    g4 = (a / 2, first, phi, 4 * s)
    h4 = (a / 2, second, phi, 4 * (1 - s))
    rhs = q.psd_norm(g4, h4, (1 - a, second, phi, 2))
    printed = q.psd_norm(g4, h4, (1 - a, first, phi, 2))
    lhs = P(q.w() ** 2)
    return _chain(
        ["phi(w^2)", "||alpha/2[phi(g^4)+phi(h^4)]+(1-alpha)phi(|.|^2)||"],
        lhs,
        rhs,
        rhs_printed=printed,
        printed_slack=printed - lhs,
    )


def cor_halfsum_sq(case, q):
    phi = case.phi
    return _chain(["phi(w^2)", "||phi(|T|^2)+phi(|T*|^2)||/2"], phi.masked(q.w() ** 2), 0.5 * _n2(q, phi))


def th5(case, q):
    phi = case.phi
    P = phi.masked
    rhs = 0.5 * P(0.5 * q.w_abs_sum_i() ** 2) + 0.25 * P(q.w_abs_product()) + 0.125 * _n2(q, phi)
    return _chain(["phi(w^2)", "cartesian mixture"], P(q.w() ** 2), rhs)


def cor_halfsum(case, q):
    phi = case.phi
    rhs = 0.5 * q.psd_norm((1, "T", phi, 1), (1, "T*", phi, 1))
    return _chain(["phi(w)", "||phi(|T|)+phi(|T*|)||/2"], phi.masked(q.w()), rhs)


def _min_term(q, phi):
    """``min{phi(w(|T||T*|)), phi(w(T^2))}`` and which branch was taken."""
    P = phi.masked
    a, b = P(q.w_abs_product()), P(q.w(2))
    # 1 where w(|T||T*|) is selected, 0 where w(T^2) is
    return np.minimum(a, b), (a <= b).astype(float)


def th6(case, q):
    phi = case.phi
    m, branch = _min_term(q, phi)
    rhs = 0.5 * m + 0.25 * _n2(q, phi)
    return _chain(["phi(w^2)", "min{..}/2+||phi(|T|^2)+phi(|T*|^2)||/4"], phi.masked(q.w() ** 2), rhs, min_abs_branch=branch)


def th8(case, q):
    phi = case.phi
    m, branch = _min_term(q, phi)
    rhs = 0.5 * m + 0.5 * phi.masked(0.5 * _n2(q))
    return _chain(["phi(w^2)", "min{..}/2+phi(||(|T|^2+|T*|^2)||/2)/2"], phi.masked(q.w() ** 2), rhs, min_abs_branch=branch)


def cor_1_1(case, q):
    h = 0.5 * _n2(q)
    return _chain(["w^2(T)", "log(e^w(T^2)/2+e^h/2)", "||T*T+TT*||/2"], q.w() ** 2, log_mean_exp(q.w(2), h), h)


def cor_1_2(case, q):
    h = 0.5 * _n2(q)
    return _chain(["w^2(T)", "log(e^w(|T||T*|)/2+e^h/2)", "||T*T+TT*||/2"], q.w() ** 2, log_mean_exp(q.w_abs_product(), h), h)


def cor_prop1(case, q):
    h4 = 0.5 * q.psd_norm((1, "T", None, 4), (1, "T*", None, 4))
    mid = log_mean_exp(q.w(2) ** 2, h4)
    return _chain(["w^4(T)", "log(e^w^2(T^2)/2+e^h4/2)", "||(|T|^4+|T*|^4)||/2"], q.w() ** 4, mid, h4)


def th7_power(case, q):
    phi, n = case.phi, case.n
    P = phi.masked
    nt = q.norm()
    lead = 2.0 ** (1 - n) * P(q.w(n))
    mid = lead + sum(2.0**-k * P(q.norm_power(k) * nt ** (n - k)) for k in range(1, n))
    rhs = lead + (1 - 2.0 ** (1 - n)) * P(nt**n)
    return _chain(["phi(w^n)", "sum form", "norm form"], P(q.w() ** n), mid, rhs)


def _nil_chain(q, n):
    nt = q.norm()
    inner = log_mix(2.0 ** (1 - n), q.w(n), nt**n)
    return _chain(["w(T)", "(log[2^(1-n)e^w(T^n)+(1-2^(1-n))e^||T||^n])^(1/n)", "||T||"], q.w(), inner ** (1.0 / n), nt)


def cor_nil(case, q):
    return _nil_chain(q, case.n)


def cor_N222(case, q):
    return _nil_chain(q, 2)


def nilpotent_constant(n: int) -> float:
    """``(log(2^(1-n) + (1 - 2^(1-n)) e))^(1/n)``."""
    a = 2.0 ** (1 - n)
    return float(np.log(a + (1.0 - a) * np.e) ** (1.0 / n))


# T^n counts as zero below this multiple of max(1, ||T||)^n
NILPOTENT_RTOL = 1e-13


def cor_nilpotent(case, q):
    n = case.n
    nt = q.norm()
    tn = q.norm_power(n)
    chain = _chain(["w(T)", "c_n ||T||", "||T||"], q.w(), nilpotent_constant(n) * nt, nt)
    chain.applicable = tn <= NILPOTENT_RTOL * np.maximum(1.0, nt) ** n
    return chain


# -- two operators -------------------------------------------------------------


def _submult_ok(phi, magnitude) -> np.ndarray | None:
    """Draws on which ``phi`` is known sub-multiplicative for the magnitudes used."""
    if phi.submult.state == "exact":
        return None
    return np.array([phi.submult.covers(float(m)) for m in magnitude], dtype=bool)


def _th1_terms(q, phi, v):
    P = phi.masked
    c = 1.0 + v
    a = q.w_adj_product()
    n2 = q.psd_norm((1, "T", phi, 2), (1, "S", phi, 2))
    n4 = q.psd_norm((1, "T", phi, 4), (1, "S", phi, 4))
    rhs = 1 / (2 * c) * P(a) * n2 + v / (2 * c) * P(q.w_square_product()) + v / (4 * c) * n4
    return a, rhs


def th1_product(case, q):
    phi = case.phi
    a, rhs = _th1_terms(q, phi, case.v)
    chain = _chain(["phi(w^2(T*S))", "f-weighted mixture"], phi.masked(a**2), rhs)
    chain.applicable = _submult_ok(phi, np.maximum(1.0, np.maximum(q.norm(), q.norm_pair())) ** 2)
    return chain


def th1_power(case, q):
    r = case.r
    a, rhs = _th1_terms(q, power(r), case.v)
    tail = 0.5 * q.psd_norm((1, "T", None, 4 * r), (1, "S", None, 4 * r))
    return _chain(["w^2r(T*S)", "mixture", "||(|T|^4r+|S|^4r)||/2"], a ** (2 * r), rhs, tail)


def th1_power_t(case, q):
    r = case.r
    a, rhs = _th1_terms(q, power(r), case.v)
    return _chain(["w^2r(T*S)", "mixture"], a ** (2 * r), rhs)


def _kittaneh_moradi_like(q, v, a):
    """``||(|T|^2+|S|^2)|| w(T*S) / (2(1+v)) + v ||(|T|^4+|S|^4)|| / (2(1+v))``."""
    n2 = q.psd_norm((1, "T", None, 2), (1, "S", None, 2))
    n4 = q.psd_norm((1, "T", None, 4), (1, "S", None, 4))
    return 1 / (2 * (1 + v)) * n2 * a + v / (2 * (1 + v)) * n4


def _product_corollary(q, v):
    a, mid = _th1_terms(q, _IDENTITY, v)
    printed = q.w_adj_product_printed()
    return _chain(
        ["w^2(T*S)", "refined", "norm-only tail"],
        a**2,
        mid,
        _kittaneh_moradi_like(q, v, a),
        lhs_printed=printed**2,
        printed_delta=printed**2 - a**2,
    )


def cor_N1(case, q):
    return _product_corollary(q, 0.5)


def cor_11(case, q):
    return _product_corollary(q, case.v)


CHAINS: dict[str, Callable[[BoundCase, Quantities], ChainValues]] = {
    f.__name__: f
    for f in [
        base_norm,
        base_kittaneh,
        base_elhaddad,
        base_abuomar,
        base_bhunia,
        dragomir_product,
        power_norm,
        th2_gh,
        cor_22,
        th3_alpha,
        th4_gh_alpha,
        cor_halfsum_sq,
        th5,
        cor_halfsum,
        th6,
        th8,
        cor_1_1,
        cor_1_2,
        cor_prop1,
        th7_power,
        cor_nil,
        cor_N222,
        cor_nilpotent,
        th1_product,
        th1_power,
        th1_power_t,
        cor_N1,
        cor_11,
    ]
}
