"""Dense complex matrix helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`check_matrix`
is the single entry point that validates shape, size and finiteness.  The
spectral routines here are the substrate for every bound in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

MAX_DIM = 64

# Relative tolerance used to accept a matrix as Hermitian.
HERMITIAN_RTOL = 1e-12
# Eigenvalues in [-PSD_RTOL * ||A||, 0) are clamped to zero.
PSD_RTOL = 1e-10


class MatrixError(ValueError):
    """Raised for malformed matrix input (shape, size, non-finite entries)."""


def check_matrix(T, name: str = "T") -> np.ndarray:
    """Validate ``T`` as a square finite complex matrix and return a copy.

    Parameters
    ----------
    T : array_like
        Candidate matrix, anything ``numpy.asarray`` accepts.
    name : str
        Used in error messages.

    Returns
    -------
    numpy.ndarray
        ``complex128`` array of shape ``(n, n)`` with ``1 <= n <= 64``.
    """
    try:
        arr = np.array(T, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise MatrixError(f"{name}: cannot convert to a complex array ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixError(f"{name}: expected a square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    if not 1 <= n <= MAX_DIM:
        raise MatrixError(f"{name}: dimension {n} outside supported range 1..{MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise MatrixError(f"{name}: entries must be finite")
    return arr


def adjoint(T: np.ndarray) -> np.ndarray:
    """Conjugate transpose; works on stacks of matrices too."""
    return np.conj(np.swapaxes(T, -1, -2))


def allclose(A, B, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    return bool(np.max(np.abs(np.asarray(A) - np.asarray(B)), initial=0.0) <= atol)


def is_hermitian(A: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    return allclose(A, adjoint(A), rtol * scale)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return (V * self.values) @ adjoint(V)


def _jacobi_eigh(A: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a complex Hermitian matrix.

    Each rotation first removes the phase of ``a_pq`` with a diagonal unitary and
    then applies the real symmetric Jacobi rotation, so one step is the unitary
    ``G = D J`` and ``A <- G^H A G``.
    """
    A = np.array(A, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(A)
    if n == 1 or fro == 0.0:
        return np.real(np.diag(A)).copy(), V
    target = 1e-14 * fro
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G restricted to the (p, q) plane
                gpp, gpq = c, s
                gqp, gqq = -s * np.conj(phase), c * np.conj(phase)
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = col_p * gpp + col_q * gqp
                A[:, q] = col_p * gpq + col_q * gqq
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = np.conj(gpp) * row_p + np.conj(gqp) * row_q
                A[q, :] = np.conj(gpq) * row_p + np.conj(gqq) * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = vp * gpp + vq * gqp
                V[:, q] = vp * gpq + vq * gqq
    return np.real(np.diag(A)).copy(), V


def hermitian_eig(A, method: str = "lapack") -> EigenDecomposition:
    """Full spectral decomposition of a Hermitian matrix.

    Parameters
    ----------
    A : array_like
        Hermitian within ``1e-12 * max(1, max|a_ij|)``.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the cyclic
        Jacobi iteration in pure numpy.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending.
    """
    A = check_matrix(A, "A")
    if not is_hermitian(A):
        raise MatrixError("A: matrix is not Hermitian within tolerance")
    H = 0.5 * (A + adjoint(A))
    if method == "lapack":
        values, vectors = np.linalg.eigh(H)
    elif method == "jacobi":
        values, vectors = _jacobi_eigh(H)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], vectors[:, order])


def operator_norm(T) -> float:
    """Largest singular value, ``sqrt(lambda_max(T* T))``."""
    T = check_matrix(T)
    gram = adjoint(T) @ T
    lam = np.linalg.eigvalsh(0.5 * (gram + adjoint(gram)))[-1]
    return float(np.sqrt(max(lam, 0.0)))


def abs_op(T, method: str = "svd") -> np.ndarray:
    """Operator absolute value ``|T| = (T* T)^{1/2}``.

    With ``method="svd"`` (default) ``T = U diag(s) W*`` gives ``|T| = W diag(s) W*``,
    which keeps full relative accuracy in the small singular values.
    ``method="eig"`` takes the square root of the clamped spectrum of ``T* T``.
    """
    T = check_matrix(T)
    if method == "svd":
        _, s, Wh = np.linalg.svd(T)
        W = adjoint(Wh)
        out = (W * s) @ Wh
    elif method == "eig":
        out = psd_fun(adjoint(T) @ T, np.sqrt)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 0.5 * (out + adjoint(out))


def _clamped_spectrum(A: np.ndarray) -> EigenDecomposition:
    eig = hermitian_eig(A)
    lam = eig.values
    scale = max(abs(lam[0]), abs(lam[-1]), 0.0)
    if lam[-1] < -PSD_RTOL * scale:
        raise MatrixError(f"matrix is not positive semidefinite (eigenvalue {lam[-1]:.3e})")
    return EigenDecomposition(np.maximum(lam, 0.0), eig.vectors)


def psd_fun(A, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral mapping ``V diag(f(lambda)) V*`` of a PSD matrix.

    ``f`` is applied to the vector of (clamped) eigenvalues.  Powers follow
    numpy's ``0.0 ** 0 == 1`` so ``t**0`` maps to the identity.
    """
    eig = _clamped_spectrum(A)
    fl = np.asarray(f(eig.values), dtype=float)
    if fl.shape != eig.values.shape or not np.all(np.isfinite(fl)):
        raise MatrixError("spectral function returned non-finite values")
    V = eig.vectors
    out = (V * fl) @ adjoint(V)
    return 0.5 * (out + adjoint(out))


def psd_power(A, p: float) -> np.ndarray:
    return psd_fun(A, lambda lam: np.power(lam, p))


# --------------------------------------------------------------------------
# matrix files
# --------------------------------------------------------------------------


def matrix_to_json(T: np.ndarray) -> dict:
    T = check_matrix(T)
    return {
        "n": int(T.shape[0]),
        "data": [[float(z.real), float(z.imag)] for z in T.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["n"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixError(f"matrix JSON must have 'n' and 'data' ({exc})") from None
    if n < 1 or len(data) != n * n:
        raise MatrixError(f"matrix JSON: expected {n * n} entries, got {len(data)}")
    try:
        vals = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise MatrixError(f"matrix JSON: bad entry ({exc})") from None
    return check_matrix(np.array(vals).reshape(n, n))


def format_matrix_text(T: np.ndarray) -> str:
    T = check_matrix(T)
    lines = [str(T.shape[0])]
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in T.ravel()]
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    tokens = text.split()
    if not tokens:
        raise MatrixError("empty matrix file")
    try:
        n = int(tokens[0])
        nums = [float(x) for x in tokens[1:]]
    except ValueError as exc:
        raise MatrixError(f"matrix text: {exc}") from None
    if n < 1 or len(nums) != 2 * n * n:
        raise MatrixError(f"matrix text: expected {2 * n * n} numbers after n={n}")
    arr = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
    return check_matrix(arr.reshape(n, n))


def load_matrix(path) -> np.ndarray:
    """Read a matrix in the JSON or whitespace text format (auto-detected)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixError(f"cannot read {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixError(f"{path}: invalid JSON ({exc})") from None
        return matrix_from_json(obj)
    return parse_matrix_text(text)


def save_matrix(T: np.ndarray, path, fmt: str | None = None) -> None:
    """Write ``T``; format from ``fmt`` or the suffix (``.json`` vs text)."""
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "text"
    if fmt == "json":
        path.write_text(json.dumps(matrix_to_json(T)) + "\n")
    elif fmt == "text":
        path.write_text(format_matrix_text(T))
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
