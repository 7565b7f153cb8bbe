"""Vector and positive-operator lemmas evaluated on concrete inputs.

All builders are batched: vectors have shape ``(m, n)``, matrices
``(m, n, n)``.  The inner product is linear in its first argument,
``<x, y> = sum_i x_i conj(y_i)``.
"""

from __future__ import annotations

import numpy as np

from ..linalg import MatrixError, adjoint
from .catalogue import BoundCase
from .chains import ChainValues, _chain, log_mean_exp

UNIT_TOL = 1e-10
PSD_TOL = 1e-10


def inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum(x * np.conj(y), axis=-1)


def vnorm(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(x) ** 2, axis=-1))


def _spectral(A: np.ndarray, x: np.ndarray):
    """Eigenvalues of ``A`` (clamped at 0) and weights ``|<x, v_i>|^2``."""
    lam, V = np.linalg.eigh(0.5 * (A + adjoint(A)))
    scale = np.max(np.abs(lam), axis=-1, initial=0.0)
    if np.any(lam[:, 0] < -PSD_TOL * np.maximum(scale, 1.0)):
        raise MatrixError("lemma input must be positive semidefinite")
    weights = np.abs(np.einsum("mji,mj->mi", np.conj(V), x)) ** 2
    return np.maximum(lam, 0.0), weights


def buzano_vec(case, d):
    x, y, e = d["x"], d["y"], d["e"]
    lhs = np.abs(inner(x, e) * inner(e, y))
    rhs = 0.5 * (vnorm(x) * vnorm(y) + np.abs(inner(x, y)))
    return _chain(["|<x,e><e,y>|", "(|x||y|+|<x,y>|)/2"], lhs, rhs)


def gen_cauchy_vec(case, d):
    x, y = d["x"], d["y"]
    v = case.v
    c = np.abs(inner(x, y))
    p = vnorm(x) * vnorm(y)
    mid = v / (1 + v) * p**2 + 1 / (1 + v) * c * p
    return _chain(["|<x,y>|^2", "weighted mixture", "|x|^2|y|^2"], c**2, mid, p**2)


def mccarthy_vec(case, d):
    lam, wts = _spectral(d["A"], d["e"])
    lhs = np.sum(lam * wts, axis=-1) ** case.r
    rhs = np.sum(np.power(lam, case.r) * wts, axis=-1)
    return _chain(["<Ax,x>^r", "<A^r x,x>"], lhs, rhs)


def op_jensen_vec(case, d):
    phi = case.phi
    lam, wts = _spectral(d["A"], d["e"])
    fl = phi.masked(lam)
    rhs = np.sum(np.where(np.isfinite(fl), fl, 0.0) * wts, axis=-1)
    rhs = np.where(np.all(np.isfinite(fl), axis=-1), rhs, np.nan)
    return _chain(["phi(<Ax,x>)", "<phi(A)x,x>"], phi.masked(np.sum(lam * wts, axis=-1)), rhs)


def mixed_schwarz_vec(case, d):
    T, x, y = d["T"], d["x"], d["y"]
    s = case.s
    U, sig, Wh = np.linalg.svd(T)
    W = adjoint(Wh)
    # ||T|^s x| = |diag(sig^s) W* x|,  ||T*|^(1-s) y| = |diag(sig^(1-s)) U* y|
    left = vnorm(np.power(sig, s) * np.einsum("mji,mj->mi", np.conj(W), x))
    right = vnorm(np.power(sig, 1 - s) * np.einsum("mji,mj->mi", np.conj(U), y))
    lhs = np.abs(inner(np.einsum("mij,mj->mi", T, x), y))
    return _chain(["|<Tx,y>|", "||T|^s x| ||T*|^(1-s) y|"], lhs, left * right)


def ext_buzano_vec(case, d):
    xs, e = d["xs"], d["e"]
    k = case.n
    if xs.shape[1] < k:
        raise ValueError(f"ext_buzano_vec with n={k} needs {k} vectors, got {xs.shape[1]}")
    xs = xs[:, :k]
    proj = np.einsum("mkj,mj->mk", xs, np.conj(e))  # <x_k, e>
    lhs = np.abs(np.prod(proj, axis=1))
    rest = np.prod(proj[:, 2:], axis=1)
    rhs = 0.5 * (np.abs(inner(xs[:, 0], xs[:, 1]) * rest) + np.prod(vnorm(xs), axis=1))
    return _chain(["|prod <x_k,e>|", "(|<x1,x2> prod <x_k,e>| + prod |x_k|)/2"], lhs, rhs)


def orlicz_buzano_vec(case, d):
    x, y, e = d["x"], d["y"], d["e"]
    phi = case.phi
    a = np.abs(inner(x, e) * inner(e, y))
    b = vnorm(x) * vnorm(y)
    c = np.abs(inner(x, y))
    if phi.kind == "exp_minus_one":
        return _chain(["|<x,e><e,y>|", "log(e^(|x||y|)/2+e^|<x,y>|/2)", "|x||y|"], a, log_mean_exp(b, c), b)
    if phi.kind == "exp_square_minus_one":
        mid = np.sqrt(log_mean_exp(b**2, c**2))
        return _chain(["|<x,e><e,y>|", "(log(e^(|x||y|)^2/2+e^|<x,y>|^2/2))^(1/2)", "|x||y|"], a, mid, b)
    P = phi.masked
    return _chain(["phi(|<x,e><e,y>|)", "(phi(|x||y|)+phi(|<x,y>|))/2"], P(a), 0.5 * (P(b) + P(c)))


LEMMAS = {
    f.__name__: f
    for f in [
        buzano_vec,
        gen_cauchy_vec,
        mccarthy_vec,
        op_jensen_vec,
        mixed_schwarz_vec,
        ext_buzano_vec,
        orlicz_buzano_vec,
    ]
}

# which inputs each lemma consumes
REQUIRES = {
    "buzano_vec": ("x", "y", "e"),
    "gen_cauchy_vec": ("x", "y"),
    "mccarthy_vec": ("A", "e"),
    "op_jensen_vec": ("A", "e"),
    "mixed_schwarz_vec": ("T", "x", "y"),
    "ext_buzano_vec": ("xs", "e"),
    "orlicz_buzano_vec": ("x", "y", "e"),
}


def prepare_inputs(case: BoundCase, inputs: dict) -> dict:
    """Validate and batch lemma inputs (adds a leading axis to single inputs)."""
    needed = REQUIRES[case.id]
    missing = [k for k in needed if inputs.get(k) is None]
    if missing:
        raise ValueError(f"{case.id} needs input(s) {', '.join(missing)}")
    out = {}
    for key in needed:
        arr = np.asarray(inputs[key], dtype=np.complex128)
        single_ndim = 1 if key in ("x", "y", "e") else 2
        if arr.ndim == single_ndim:
            arr = arr[None]
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{case.id}: input {key} has non-finite entries")
        out[key] = arr
    sizes = {v.shape[0] for v in out.values()}
    dims = {v.shape[-1] for v in out.values()}
    if len(sizes) != 1 or len(dims) != 1:
        raise ValueError(f"{case.id}: inputs have inconsistent shapes")
    if "e" in out:
        err = np.abs(vnorm(out["e"]) - 1.0)
        if np.any(err > UNIT_TOL):
            raise ValueError(f"{case.id}: e must be a unit vector (| |e| - 1 | = {float(np.max(err)):.2e})")
    if "A" in out:
        A = out["A"]
        scale = np.maximum(1.0, np.max(np.abs(A), axis=(1, 2)))
        if np.any(np.max(np.abs(A - adjoint(A)), axis=(1, 2)) > 1e-12 * scale):
            raise MatrixError(f"{case.id}: A must be Hermitian")
    return out


def vector_chain(case: BoundCase, inputs: dict) -> ChainValues:
    return LEMMAS[case.id](case, prepare_inputs(case, inputs))
