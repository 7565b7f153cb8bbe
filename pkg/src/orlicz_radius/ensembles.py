"""Seeded random-matrix ensembles.

Each draw is a pure function of ``(spec, index)``: the counter-based stream for
draw ``index`` is keyed by the EnsembleSpec seed and a tag naming the family, size
and index, so draws can be generated in any order or in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .linalg import MAX_DIM

FAMILIES = (
    "ginibre",
    "hermitian",
    "normal",
    "unitary",
    "nilpotent_jordan",
    "nilpotent_random",
    "rank1",
    "scaled",
)
# paired operators S are drawn from seed ^ PAIR_SALT
PAIR_SALT = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleSpec:
    family: str
    n: int
    count: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown ensemble family {self.family!r}")
        if not 1 <= int(self.n) <= MAX_DIM:
            raise ValueError(f"dimension {self.n} outside 1..{MAX_DIM}")
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if self.family == "scaled":
            base = self.params.get("base")
            if base not in FAMILIES or base == "scaled":
                raise ValueError("scaled ensembles need params.base naming another family")
            if "c" not in self.params:
                raise ValueError("scaled ensembles need params.c (a number or [re, im])")
            scale_factor(self.params)

    @property
    def label(self) -> str:
        if self.family == "scaled":
            c = scale_factor(self.params)
            return f"scaled({self.params['base']},{c.real:g}{c.imag:+g}j)"
        return self.family

    def paired(self) -> "EnsembleSpec":
        """Spec for the independent second operator of two-operator bounds."""
        return EnsembleSpec(self.family, self.n, self.count, (self.seed ^ PAIR_SALT) & _MASK64, dict(self.params))

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": int(self.n),
            "count": int(self.count),
            "seed": int(self.seed),
            "params": _jsonable(self.params),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        try:
            return cls(
                family=obj["family"],
                n=int(obj["n"]),
                count=int(obj.get("count", 1)),
                seed=int(obj.get("seed", 0)),
                params=dict(obj.get("params") or {}),
            )
        except KeyError as exc:
            raise ValueError(f"ensemble spec missing field {exc}") from None


def _jsonable(params: dict) -> dict:
    out = {}
    for key in sorted(params):
        value = params[key]
        if isinstance(value, complex):
            value = [value.real, value.imag]
        out[key] = value
    return out


def scale_factor(params: dict) -> complex:
    c = params.get("c", 1.0)
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ValueError("params.c must be a number or [re, im]")
        c = complex(float(c[0]), float(c[1]))
    return complex(c)


def _tag(family: str, n: int, index: int, stream: str = "T") -> str:
    return f"{family}|{n}|{index}|{stream}"


def _gaussian(seed, family, n, index, count, stream="T"):
    return _rng.complex_gaussians(seed, _tag(family, n, index, stream), count)


def _unitary_from(G: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return Q * phases


def _draw(family: str, n: int, seed: int, index: int) -> np.ndarray:
    if family == "ginibre":
        return _gaussian(seed, family, n, index, n * n).reshape(n, n)
    if family == "hermitian":
        G = _gaussian(seed, family, n, index, n * n).reshape(n, n)
        return 0.5 * (G + G.conj().T)
    if family == "unitary":
        return _unitary_from(_gaussian(seed, family, n, index, n * n).reshape(n, n))
    if family == "normal":
        z = _gaussian(seed, family, n, index, n * n + n)
        U = _unitary_from(z[: n * n].reshape(n, n))
        return (U * z[n * n :]) @ U.conj().T
    if family == "nilpotent_jordan":
        return np.diag(np.ones(n - 1), 1).astype(np.complex128)
    if family == "nilpotent_random":
        return np.triu(_gaussian(seed, family, n, index, n * n).reshape(n, n), 1)
    if family == "rank1":
        z = _gaussian(seed, family, n, index, 2 * n)
        return np.outer(z[:n], z[n:].conj())
    raise ValueError(f"unknown ensemble family {family!r}")


def generate(spec: EnsembleSpec, index: int) -> np.ndarray:
    """Draw ``index`` of ``spec`` as an ``(n, n)`` complex array."""
    if not 0 <= index < spec.count:
        raise IndexError(f"index {index} outside 0..{spec.count - 1}")
    if spec.family == "scaled":
        return scale_factor(spec.params) * _draw(spec.params["base"], spec.n, spec.seed, index)
    return _draw(spec.family, spec.n, spec.seed, index)


def generate_batch(spec: EnsembleSpec, indices=None) -> np.ndarray:
    idx = range(spec.count) if indices is None else indices
    out = np.empty((len(idx), spec.n, spec.n), dtype=np.complex128)
    for k, i in enumerate(idx):
        out[k] = generate(spec, i)
    return out


def random_vectors(spec: EnsembleSpec, index: int, k: int) -> np.ndarray:
    """``k`` complex Gaussian vectors of length ``n`` tied to draw ``index``."""
    family = spec.params.get("base", spec.family) if spec.family == "scaled" else spec.family
    return _gaussian(spec.seed, family, spec.n, index, k * spec.n, stream="vectors").reshape(k, spec.n)


def family_predicate(family: str, T: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether ``T`` has the structural property promised by ``family``."""
    n = T.shape[0]
    scale = max(1.0, float(np.max(np.abs(T), initial=0.0)))
    if family == "hermitian":
        return bool(np.max(np.abs(T - T.conj().T)) <= tol * scale)
    if family == "unitary":
        return bool(np.max(np.abs(T.conj().T @ T - np.eye(n))) <= tol)
    if family == "normal":
        return bool(np.max(np.abs(T @ T.conj().T - T.conj().T @ T)) <= tol * scale**2)
    if family in ("nilpotent_jordan", "nilpotent_random"):
        return bool(np.all(np.linalg.matrix_power(T, n) == 0))
    if family == "rank1":
        s = np.linalg.svd(T, compute_uv=False)
        return bool(n == 1 or s[1] <= tol * max(s[0], 1.0))
    return bool(np.all(np.isfinite(T)))


def load_spec(path) -> EnsembleSpec:
    with open(path) as fh:
        return EnsembleSpec.from_json(json.load(fh))
