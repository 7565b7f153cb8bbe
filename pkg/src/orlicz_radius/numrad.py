"""Numerical radius via the support function of the numerical range.

For ``T = A + iB`` with ``A, B`` Hermitian, the rotated real part is
``H(theta) = (e^{i theta} T + e^{-i theta} T*) / 2 = cos(theta) A - sin(theta) B``
and ``w(T) = max_theta lambda_max(H(theta))``.  The maximisation is a uniform
grid scan followed by golden-section refinement of the grid's local maxima.
Everything runs on stacks of matrices so that a whole ensemble is handled by
a few batched LAPACK calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .linalg import MatrixError, adjoint, check_matrix

DEFAULT_GRID = 1024
DEFAULT_TOL = 1e-9
ANGLE_TOL = 1e-12
MIN_GRID = 16
# cap on brackets refined per matrix; only matters for (numerically) flat
# support functions such as circular numerical ranges
MAX_BRACKETS = 16
HERMITIAN_SHORTCUT_RTOL = 1e-13

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_EPS = np.finfo(float).eps
# bound on the number of complex entries materialised per eigvalsh call
_CHUNK_ENTRIES = 1 << 21


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadiusResult:
    """Outcome of :func:`numerical_radius`.

    ``certified_error`` bounds ``|value - w(T)|`` assuming the grid located the
    basin of the global maximiser.
    """

    value: float
    theta_star: float
    certified_error: float
    grid_points: int
    refinements: int


def hermitian_parts(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A, B)`` with ``T = A + iB``; accepts stacks."""
    Ts = adjoint(T)
    return 0.5 * (T + Ts), -0.5j * (T - Ts)


def _top_eigvals(A: np.ndarray, B: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``lambda_max`` of ``cos(t) A[k] - sin(t) B[k]`` for aligned stacks."""
    c = np.cos(theta)[..., None, None]
    s = np.sin(theta)[..., None, None]
    return np.linalg.eigvalsh(c * A - s * B)[..., -1]


def rotation_support(T, theta: float) -> float:
    """``lambda_max`` of ``(e^{i theta} T + e^{-i theta} T*) / 2``."""
    T = check_matrix(T)
    A, B = hermitian_parts(T)
    return float(_top_eigvals(A, B, np.asarray(theta, dtype=float)))


def _grid_scan(A: np.ndarray, B: np.ndarray, grid: int) -> np.ndarray:
    m, n = A.shape[:2]
    theta = 2.0 * np.pi * np.arange(grid) / grid
    out = np.empty((m, grid))
    step = max(1, _CHUNK_ENTRIES // (grid * n * n))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        out[lo:hi] = _top_eigvals(A[lo:hi, None], B[lo:hi, None], theta[None, :])
    return out


def _golden_max(A, B, owner, left, right, angle_tol):
    """Vectorised golden-section maximisation on brackets ``[left, right]``.

    ``owner[k]`` is the matrix index of bracket ``k``.  Returns the best value
    found, its angle and the final bracket width.
    """
    Ak, Bk = A[owner], B[owner]
    a = left.copy()
    b = right.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _top_eigvals(Ak, Bk, c)
    fd = _top_eigvals(Ak, Bk, d)
    width = float(np.max(b - a)) if len(a) else 0.0
    iterations = 0 if width <= angle_tol else math.ceil(math.log(angle_tol / width) / math.log(_INVPHI))
    for _ in range(iterations):
        keep_left = fc >= fd
        # maximum lies in [a, d] when f(c) >= f(d), else in [c, b]
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        probe = np.where(keep_left, new_c, new_d)
        fp = _top_eigvals(Ak, Bk, probe)
        # left: (c, d) <- (new_c, c); right: (c, d) <- (d, new_d)
        fc, fd = np.where(keep_left, fp, fd), np.where(keep_left, fc, fp)
        c, d = np.where(keep_left, new_c, d), np.where(keep_left, c, new_d)
    mid = 0.5 * (a + b)
    fm = _top_eigvals(Ak, Bk, mid)
    cand_val = np.stack([fm, fc, fd], axis=1)
    cand_ang = np.stack([mid, c, d], axis=1)
    pick = np.argmax(cand_val, axis=1)
    rows = np.arange(len(a))
    return cand_val[rows, pick], cand_ang[rows, pick], b - a


def _select_brackets(h: np.ndarray, grid: int) -> list[np.ndarray]:
    """Per matrix, indices of grid local maxima worth refining.

    A peak inside ``[theta_{j-1}, theta_{j+1}]`` can only beat the grid maximum
    ``hmax`` if ``h_j >= hmax cos(step)`` (the support function dominates
    ``p cos(theta - theta_p)`` around a local maximum ``p``).
    """
    step = 2.0 * np.pi / grid
    prev = np.roll(h, 1, axis=1)
    nxt = np.roll(h, -1, axis=1)
    is_peak = (h > prev) & (h >= nxt)
    hmax = h.max(axis=1)
    floor = hmax * math.cos(step) - 4 * _EPS * np.abs(hmax)
    selected = []
    for i in range(h.shape[0]):
        idx = np.flatnonzero(is_peak[i] & (h[i] >= floor[i]))
        first_max = int(np.argmax(h[i]))
        if first_max not in idx:
            idx = np.append(idx, first_max)
        order = np.lexsort((idx, -h[i, idx]))
        selected.append(np.sort(idx[order[:MAX_BRACKETS]]))
    return selected


def numerical_radius_batch(
    Ts,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    angle_tol: float = ANGLE_TOL,
) -> list[RadiusResult]:
    """:func:`numerical_radius` for a stack ``(m, n, n)`` of matrices.

    Hermitian members are answered exactly by ``max |eigenvalue|`` and exact
    zero matrices by 0; the rest go through the grid scan and refinement.
    """
    Ts = np.asarray(Ts, dtype=np.complex128)
    if Ts.ndim != 3 or Ts.shape[1] != Ts.shape[2]:
        raise MatrixError(f"expected a stack of square matrices, got shape {Ts.shape}")
    if grid < MIN_GRID:
        raise ValueError(f"grid must be at least {MIN_GRID}, got {grid}")
    if not np.all(np.isfinite(Ts)):
        raise MatrixError("matrix entries must be finite")
    m, n = Ts.shape[:2]
    A, B = hermitian_parts(Ts)
    scale = np.max(np.abs(Ts), axis=(1, 2), initial=0.0)
    norms = np.linalg.norm(Ts, ord=2, axis=(1, 2)) if m else np.zeros(0)
    fp_err = 8.0 * n * _EPS * norms

    values = np.zeros(m)
    thetas = np.zeros(m)
    errors = fp_err.copy()
    grid_used = np.zeros(m, dtype=int)
    refinements = np.zeros(m, dtype=int)

    zero = scale == 0.0
    herm = ~zero & (np.max(np.abs(B), axis=(1, 2), initial=0.0) <= HERMITIAN_SHORTCUT_RTOL * np.maximum(scale, 1.0))
    if np.any(herm):
        lam = np.linalg.eigvalsh(A[herm])
        top, bottom = lam[:, -1], lam[:, 0]
        values[herm] = np.maximum(top, -bottom)
        thetas[herm] = np.where(top >= -bottom, 0.0, np.pi)

    general = np.flatnonzero(~zero & ~herm)
    if general.size:
        Ag, Bg = A[general], B[general]
        h = _grid_scan(Ag, Bg, grid)
        step = 2.0 * np.pi / grid
        chosen = _select_brackets(h, grid)
        owner = np.concatenate([np.full(len(c), k) for k, c in enumerate(chosen)])
        centre = np.concatenate(chosen) * step
        best, ang, width = _golden_max(Ag, Bg, owner, centre - step, centre + step, angle_tol)
        # grid values are valid lower bounds too
        grid_val = h[owner, np.concatenate(chosen)]
        use_grid = grid_val > best
        best = np.where(use_grid, grid_val, best)
        ang = np.where(use_grid, centre, ang)
        for k, gi in enumerate(general):
            rows = np.flatnonzero(owner == k)
            # ties resolved towards the smallest angle
            angles = np.mod(ang[rows], 2.0 * np.pi)
            order = np.lexsort((angles, -best[rows]))
            pick = rows[order[0]]
            values[gi] = best[pick]
            thetas[gi] = float(np.mod(ang[pick], 2.0 * np.pi))
            errors[gi] += norms[gi] * float(np.max(width[rows])) ** 2 / 8.0
            grid_used[gi] = grid
            refinements[gi] = len(rows)

    results = []
    for i in range(m):
        if errors[i] > tol * max(1.0, norms[i]):
            raise ConvergenceError(
                f"certified error {errors[i]:.3e} exceeds tolerance {tol:.1e} for matrix {i}"
            )
        results.append(
            RadiusResult(
                value=float(max(values[i], 0.0)),
                theta_star=float(thetas[i]),
                certified_error=float(errors[i]),
                grid_points=int(grid_used[i]),
                refinements=int(refinements[i]),
            )
        )
    return results


def numerical_radius(T, grid: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> RadiusResult:
    """Numerical radius ``w(T) = sup_{|x|=1} |<Tx, x>|``.

    Parameters
    ----------
    T : array_like
        Square complex matrix.
    grid : int
        Number of uniformly spaced angles scanned before refinement (>= 16).
    tol : float
        Required bound on ``certified_error``, relative to ``max(1, ||T||)``.
    """
    T = check_matrix(T)
    return numerical_radius_batch(T[None], grid=grid, tol=tol)[0]


def radius_values(Ts, grid: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Just the ``value`` fields of :func:`numerical_radius_batch`."""
    return np.array([r.value for r in numerical_radius_batch(Ts, grid=grid, tol=tol)])


def radius_oracle(T, samples: int, seed: int = 0, chunk: int = 20000) -> float:
    """Independent lower bound on ``w(T)``.

    Maximum of ``|<Tx, x>|`` over ``samples`` random unit vectors (normalised
    complex Gaussians from the counter-based stream) and over every eigenvector
    of ``H(theta)`` on a 64-point angle grid.
    """
    T = check_matrix(T)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = T.shape[0]
    best = 0.0
    for start in range(0, samples, chunk):
        count = min(chunk, samples - start)
        X = _rng.complex_gaussians(seed, f"oracle|{n}|{start}", count * n).reshape(count, n)
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        q = np.einsum("ki,ij,kj->k", X.conj(), T, X)
        best = max(best, float(np.max(np.abs(q))))
    A, B = hermitian_parts(T)
    theta = 2.0 * np.pi * np.arange(64) / 64
    H = np.cos(theta)[:, None, None] * A - np.sin(theta)[:, None, None] * B
    _, V = np.linalg.eigh(H)
    q = np.einsum("tik,ij,tjk->tk", V.conj(), T, V)
    return max(best, float(np.max(np.abs(q))))


def boundary_angles(m: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(m) / m


def range_boundary(T, m: int) -> np.ndarray:
    """Support points ``<Tv, v>`` of the numerical range for ``m`` angles.

    ``v`` is the top eigenvector of ``H(theta_k) = Re(e^{i theta_k} T)``,
    ``theta_k = 2 pi k / m``, so point ``k`` is where ``W(T)`` touches its
    supporting line with outward normal ``e^{-i theta_k}``.
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    T = check_matrix(T)
    A, B = hermitian_parts(T)
    theta = boundary_angles(m)
    H = np.cos(theta)[:, None, None] * A - np.sin(theta)[:, None, None] * B
    _, V = np.linalg.eigh(H)
    v = V[:, :, -1]
    return np.einsum("ti,ij,tj->t", v.conj(), T, v)
