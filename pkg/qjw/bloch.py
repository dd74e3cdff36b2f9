"""Generalized Bloch representation: B = d*rho - 1 with the scaled inner product."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from qjw.config import TOL_DESIGN, TOL_PSD
from qjw.linalg import as_hermitian, gell_mann_basis, make_rng, min_eigenvalue


@dataclass(frozen=True)
class BlochVector:
    d: int
    op: np.ndarray

    def norm(self) -> float:
        return bloch_norm(self)


@dataclass(frozen=True)
class BlochGeometry:
    d: int

    @property
    def r_in(self) -> float:
        return 1.0 / (self.d - 1)

    @property
    def r_out(self) -> float:
        return 1.0

    def in_inball(self, b: BlochVector, tol: float = TOL_DESIGN) -> bool:
        return bloch_norm(b) <= self.r_in + tol

    def in_outball(self, b: BlochVector, tol: float = TOL_DESIGN) -> bool:
        return bloch_norm(b) <= self.r_out + tol

    def in_body(self, b: BlochVector, tol: float = TOL_PSD) -> bool:
        return in_bloch_body(b, tol)


def _check_state(rho: np.ndarray, tol: float) -> np.ndarray:
    rho = as_hermitian(rho, "rho")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"state must have unit trace, got {tr:.12g}")
    lo = min_eigenvalue(rho)
    if lo < -TOL_PSD:
        raise ValueError(f"state is not PSD, min eigenvalue {lo:.3e}")
    return rho


def state_to_bloch(rho: np.ndarray, tol: float = TOL_DESIGN) -> BlochVector:
    rho = _check_state(rho, tol)
    d = rho.shape[0]
    return BlochVector(d, d * rho - np.eye(d, dtype=complex))


def bloch_to_state(b: BlochVector) -> np.ndarray:
    if not in_bloch_body(b):
        raise ValueError("Bloch vector lies outside the Bloch body")
    return (np.eye(b.d, dtype=complex) + b.op) / b.d


def in_bloch_body(b: BlochVector, tol: float = TOL_PSD) -> bool:
    if abs(np.trace(b.op)) > TOL_DESIGN * max(1.0, float(np.linalg.norm(b.op))):
        return False
    return min_eigenvalue((np.eye(b.d, dtype=complex) + b.op) / b.d) >= -tol


def bloch_inner(b1: BlochVector, b2: BlochVector) -> float:
    if b1.d != b2.d:
        raise ValueError(f"dimension mismatch: {b1.d} vs {b2.d}")
    d = b1.d
    return float(np.real(np.trace(b1.op @ b2.op))) / (d * (d - 1))


def bloch_norm(b: BlochVector) -> float:
    return float(np.sqrt(max(bloch_inner(b, b), 0.0)))


def bloch_projector_apply(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    d = x.shape[0]
    return x - np.eye(d, dtype=complex) * np.trace(x) / d


def traceless_basis(d: int, rng: np.random.Generator | None = None) -> list[np.ndarray]:
    """Orthonormal basis of the traceless Hermitian matrices, rotated when ``rng`` is given."""
    gm = gell_mann_basis(d)
    if rng is None:
        return gm
    m = len(gm)
    q, r = sla.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    return [sum(q[i, a] * gm[i] for i in range(m)) for a in range(m)]


def simplex_gram(n: int, kappa: float) -> np.ndarray:
    """Gram matrix kappa^2 (n delta - 1)/(n - 1) of an (n, kappa)-regular simplex."""
    return kappa**2 * (n * np.eye(n) - np.ones((n, n))) / (n - 1)


def vectors_from_gram(gram: np.ndarray, d: int, rng: np.random.Generator | None) -> list[BlochVector]:
    """Bloch vectors whose scaled Gram matrix equals ``gram``."""
    w, v = sla.eigh(gram)
    keep = w > TOL_DESIGN * max(1.0, float(np.max(w)))
    coords = v[:, keep] * np.sqrt(w[keep])
    basis = traceless_basis(d, rng)
    if coords.shape[1] > len(basis):
        raise ValueError(f"Gram rank {coords.shape[1]} exceeds d^2 - 1 = {len(basis)}")
    scale = np.sqrt(d * (d - 1))
    out = []
    for row in coords:
        op = sum(c * basis[a] for a, c in enumerate(row)) * scale
        out.append(BlochVector(d, np.asarray(op, dtype=complex)))
    return out


def regular_simplex(n: int, kappa: float, d: int, seed: int = 0) -> list[BlochVector]:
    if not 2 <= n <= d * d:
        raise ValueError(f"simplex size must lie in [2, {d * d}], got {n}")
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return vectors_from_gram(simplex_gram(n, kappa), d, make_rng(seed))


def bloch_gram(vectors: list[BlochVector]) -> np.ndarray:
    n = len(vectors)
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = bloch_inner(vectors[i], vectors[j])
    return g


def purity_test(rho: np.ndarray, tol: float = TOL_DESIGN) -> bool:
    rho = as_hermitian(rho, "rho")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"state must have unit trace, got {tr:.12g}")
    r2 = rho @ rho
    return abs(np.trace(r2).real - 1.0) <= tol and abs(np.trace(r2 @ rho).real - 1.0) <= tol
