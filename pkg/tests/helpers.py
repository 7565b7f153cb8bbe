"""Shared test helpers and independent oracles."""

import numpy as np

J2 = np.array([[0, 1], [0, 0]], dtype=complex)


def jordan(n):
    """Nilpotent Jordan block with ones on the superdiagonal."""
    return np.diag(np.ones(n - 1), 1).astype(complex)


def ginibre(rng, n, m=None):
    shape = (n, n) if m is None else (m, n, n)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def ellipse_radius(T, samples=400_000):
    """w(T) for 2x2 T from the elliptical range theorem (independent oracle).

    W(T) is the ellipse with foci at the eigenvalues and minor axis
    sqrt(tr(T*T) - |l1|^2 - |l2|^2).
    """
    l1, l2 = np.linalg.eigvals(T)
    minor = np.sqrt(max(np.sum(np.abs(T) ** 2) - abs(l1) ** 2 - abs(l2) ** 2, 0.0))
    focal = abs(l1 - l2)
    major = np.hypot(focal, minor)
    centre = 0.5 * (l1 + l2)
    rot = (l1 - l2) / focal if focal > 0 else 1.0
    t = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    pts = centre + rot * (0.5 * major * np.cos(t) + 0.5j * minor * np.sin(t))
    return float(np.max(np.abs(pts)))



# -- acceptance bookkeeping -----------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion, ok, detail):
    """Remember (and print) the outcome of one acceptance criterion."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok
