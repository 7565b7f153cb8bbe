"""Shared operator quantities for a batch of inputs.

Every bound chain is assembled from a small vocabulary: numerical radii of a
few derived matrices, operator norms, and norms of positive combinations of
spectral functions of ``|T|``, ``|T*|`` and ``|S|``.  :class:`Quantities`
computes each of these once per batch ``(m, n, n)`` and caches it, so chains
that share a term see bitwise-identical numbers.

A batch can be viewed at a per-draw scale ``c`` (:meth:`Quantities.scaled`):
the quantities of ``cT`` follow from those of ``T`` by homogeneity, so the
expensive radius computations are never repeated.
"""

from __future__ import annotations

import numpy as np

from ..linalg import adjoint
from ..numrad import DEFAULT_TOL, radius_values
from ..orlicz import OrliczFn

# Angular grid used by the verification machinery.  Refinement makes the
# result insensitive to this choice; 128 points keep suite runs short.
SUITE_GRID = 128

_OPS = ("T", "T*", "S")


def _psd_from(V: np.ndarray, vals: np.ndarray) -> np.ndarray:
    out = (V * vals[:, None, :]) @ adjoint(V)
    return 0.5 * (out + adjoint(out))


class _Store:
    """Unscaled caches shared between scaled views of one batch."""

    def __init__(self, T, S, grid, tol):
        self.T = T
        self.S = S
        self.grid = grid
        self.tol = tol
        U, sig, Wh = np.linalg.svd(T)
        # T = U diag(sig) W*:  |T| = W sig W*,  |T*| = U sig U*
        self.sig = sig
        self.bases = {"T": adjoint(Wh), "T*": U}
        if S is not None:
            _, sig_s, Wh_s = np.linalg.svd(S)
            self.sig_s = sig_s
            self.bases["S"] = adjoint(Wh_s)
        self.radii: dict = {}
        self.norms: dict = {}

    def radius(self, key, build):
        if key not in self.radii:
            self.radii[key] = radius_values(build(), grid=self.grid, tol=self.tol)
        return self.radii[key]

    def abs_power(self, op: str, p: float) -> np.ndarray:
        """``|op|^p`` for the unscaled operator (``0^0 = 1``)."""
        sig = self.sig_s if op == "S" else self.sig
        return _psd_from(self.bases[op], np.power(sig, p))


class Quantities:
    """Lazily computed, cached quantities of ``T`` (and optionally ``S``).

    Parameters
    ----------
    T : array_like
        ``(n, n)`` matrix or ``(m, n, n)`` stack.
    S : array_like, optional
        Second operator for two-operator bounds, same shape as ``T``.
    grid, tol : int, float
        Passed to the numerical radius engine.
    """

    def __init__(self, T, S=None, grid: int = SUITE_GRID, tol: float = DEFAULT_TOL, *, _store=None, _scale=None):
        if _store is None:
            T = np.asarray(T, dtype=np.complex128)
            if T.ndim == 2:
                T = T[None]
            if S is not None:
                S = np.asarray(S, dtype=np.complex128)
                if S.ndim == 2:
                    S = S[None]
                if S.shape != T.shape:
                    raise ValueError(f"S has shape {S.shape}, expected {T.shape}")
            _store = _Store(T, S, grid, tol)
        self._s = _store
        m = _store.T.shape[0]
        self.scale = np.ones(m) if _scale is None else np.asarray(_scale, dtype=float)
        self._cache: dict = {}

    # -- views --------------------------------------------------------------

    @property
    def size(self) -> int:
        return self._s.T.shape[0]

    @property
    def dim(self) -> int:
        return self._s.T.shape[1]

    @property
    def has_pair(self) -> bool:
        return self._s.S is not None

    @property
    def is_scaled(self) -> bool:
        return bool(np.any(self.scale != 1.0))

    def scaled(self, c) -> "Quantities":
        """View of the batch with draw ``i`` replaced by ``c[i] * T_i``."""
        c = np.broadcast_to(np.asarray(c, dtype=float), (self.size,))
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise ValueError("scale factors must be finite and nonnegative")
        return Quantities(None, _store=self._s, _scale=self.scale * c)

    def matrices(self) -> np.ndarray:
        """The (scaled) input stack."""
        return self._s.T * self.scale[:, None, None]

    def pair_matrices(self) -> np.ndarray:
        self._need_pair()
        return self._s.S

    def _need_pair(self):
        if not self.has_pair:
            raise ValueError("this quantity needs a second operator S")
        if self.is_scaled:
            raise ValueError("two-operator quantities are not available on a rescaled batch")

    def _homog(self, base: np.ndarray, degree: float) -> np.ndarray:
        if not self.is_scaled:
            return base
        return base * np.power(self.scale, degree)

    # -- scalars --------------------------------------------------------------

    def norm(self) -> np.ndarray:
        """``||T||``."""
        return self._homog(self._s.sig[:, 0], 1)

    def norm_pair(self) -> np.ndarray:
        self._need_pair()
        return self._s.sig_s[:, 0]

    def norm_power(self, k: int) -> np.ndarray:
        """``||T^k||``."""
        if k == 1:
            return self.norm()
        store = self._s
        if ("pow", k) not in store.norms:
            Tk = np.linalg.matrix_power(store.T, k)
            store.norms[("pow", k)] = np.linalg.norm(Tk, ord=2, axis=(1, 2))
        return self._homog(store.norms[("pow", k)], k)

    def w(self, k: int = 1) -> np.ndarray:
        """``w(T^k)``."""
        store = self._s
        base = store.radius(("T", k), lambda: np.linalg.matrix_power(store.T, k))
        return self._homog(base, k)

    def w_gh(self, s: float) -> np.ndarray:
        """``w(|T*|^{2(1-s)} |T|^{2s})``; ``s = 1/2`` is ``w(|T*||T|)``."""
        s = float(s)
        store = self._s
        base = store.radius(
            ("gh", s),
            lambda: store.abs_power("T*", 2.0 * (1.0 - s)) @ store.abs_power("T", 2.0 * s),
        )
        return self._homog(base, 2)

    def w_abs_product(self) -> np.ndarray:
        """``w(|T*||T|)``, which equals ``w(|T||T*|)``."""
        return self.w_gh(0.5)

    def w_abs_sum_i(self) -> np.ndarray:
        """``w(|T| + i|T*|)``."""
        store = self._s
        base = store.radius(("abs_i",), lambda: store.abs_power("T", 1.0) + 1j * store.abs_power("T*", 1.0))
        return self._homog(base, 1)

    def w_adj_product(self) -> np.ndarray:
        """``w(T*S)``."""
        self._need_pair()
        store = self._s
        return store.radius(("TsS",), lambda: adjoint(store.T) @ store.S)

    def w_adj_product_printed(self) -> np.ndarray:
        """``w(S*T)``."""
        self._need_pair()
        store = self._s
        return store.radius(("SsT",), lambda: adjoint(store.S) @ store.T)

    def w_square_product(self) -> np.ndarray:
        """``w(|S|^2 |T|^2)``."""
        self._need_pair()
        store = self._s
        return store.radius(("S2T2",), lambda: store.abs_power("S", 2.0) @ store.abs_power("T", 2.0))

    def recorded(self) -> dict[str, np.ndarray]:
        """Every radius and norm computed so far, at this view's scale."""
        store = self._s
        out = {"norm(T)": self.norm()}
        for key, base in store.radii.items():
            name, degree = _RADIUS_NAMES[key[0]](key)
            if degree is None:
                if self.is_scaled:
                    continue
                out[name] = base
            else:
                out[name] = self._homog(base, degree)
        for (_, k), base in store.norms.items():
            out[f"norm(T^{k})"] = self._homog(base, k)
        return dict(sorted(out.items()))

    # -- spectral combinations -------------------------------------------------

    def psd_norm(self, *terms) -> np.ndarray:
        """``|| sum_j coef_j * phi_j(|op_j|^{p_j}) ||`` for nonnegative ``coef_j``.

        Each term is ``(coef, op, phi, p)`` with ``op`` one of ``"T"``,
        ``"T*"``, ``"S"`` and ``phi`` an :class:`OrliczFn` or ``None`` for the
        identity.  Draws where some ``phi`` is evaluated off its domain get NaN.
        """
        key = tuple((float(c), op, _phi_key(phi), float(p)) for c, op, phi, p in terms)
        if key in self._cache:
            return self._cache[key]
        store = self._s
        m, n = self.size, self.dim
        total = np.zeros((m, n, n), dtype=np.complex128)
        bad = np.zeros(m, dtype=bool)
        for coef, op, phi, p in terms:
            if op not in _OPS:
                raise ValueError(f"unknown operator {op!r}")
            if coef < 0:
                raise ValueError("psd_norm needs nonnegative coefficients")
            if coef == 0:
                continue
            if op == "S":
                self._need_pair()
                sig = store.sig_s
            else:
                sig = store.sig * self.scale[:, None]
            vals = np.power(sig, p)
            if phi is not None:
                vals = phi.masked(vals)
            rows_bad = ~np.all(np.isfinite(vals), axis=1)
            bad |= rows_bad
            vals = np.where(rows_bad[:, None], 0.0, vals)
            total += coef * _psd_from(store.bases[op], vals)
        out = np.linalg.eigvalsh(total)[:, -1] if m else np.zeros(0)
        out = np.where(bad, np.nan, np.maximum(out, 0.0))
        self._cache[key] = out
        return out


_RADIUS_NAMES = {
    "T": lambda key: ("w(T)" if key[1] == 1 else f"w(T^{key[1]})", key[1]),
    "gh": lambda key: (f"w(|T*|^{_num(2 * (1 - key[1]))}|T|^{_num(2 * key[1])})", 2),
    "abs_i": lambda key: ("w(|T|+i|T*|)", 1),
    "TsS": lambda key: ("w(T*S)", None),
    "SsT": lambda key: ("w(S*T)", None),
    "S2T2": lambda key: ("w(|S|^2|T|^2)", None),
}


def _num(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def _phi_key(phi: OrliczFn | None):
    """Identity (``None``) and ``power(1)`` give the same matrices."""
    if phi is None or (phi.kind == "power" and phi.params == (1.0,)):
        return None
    return phi
