"""Dense complex and quaternionic matrix tools shared by every other module.

Matrices are plain ``numpy`` complex arrays. Hermitian operators are the same
arrays after :func:`as_hermitian` has checked them; Kronecker products follow
``numpy.kron`` (left factor outermost).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from qjw.config import TOL_EIG, TOL_HERM_REL, TOL_PSD, TOL_RANK

SeededRng = np.random.Generator

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def make_rng(seed: int) -> SeededRng:
    """PCG64 stream; the same seed always yields the same stream."""
    return np.random.default_rng(int(seed) % 2**64)


def as_matrix(a: object) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def herm_tolerance(a: np.ndarray) -> float:
    return TOL_HERM_REL * max(float(np.linalg.norm(a)), 1.0)


def is_hermitian(a: np.ndarray, tol: float | None = None) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    tol = herm_tolerance(a) if tol is None else tol
    return float(np.max(np.abs(a - a.conj().T), initial=0.0)) <= tol


def as_hermitian(a: object, name: str = "operator") -> np.ndarray:
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not is_hermitian(arr):
        raise ValueError(f"{name} is not Hermitian")
    return (arr + arr.conj().T) / 2


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def _split_dims(n: int, dims: tuple[int, int] | None) -> tuple[int, int]:
    if dims is not None:
        d1, d2 = int(dims[0]), int(dims[1])
        if d1 * d2 != n:
            raise ValueError(f"declared factors {dims} do not multiply to {n}")
        return d1, d2
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValueError(f"dimension {n} is not a perfect square; declare the factors")
    return d, d


def partial_trace(x: np.ndarray, side: int = 2, dims: tuple[int, int] | None = None) -> np.ndarray:
    """Trace out factor ``side`` (1 or 2) of a bipartite operator."""
    x = as_matrix(x)
    d1, d2 = _split_dims(x.shape[0], dims)
    t = x.reshape(d1, d2, d1, d2)
    if side == 2:
        return np.einsum("ijkj->ik", t)
    if side == 1:
        return np.einsum("ijil->jl", t)
    raise ValueError(f"side must be 1 or 2, got {side}")


def partial_transpose(x: np.ndarray, dims: tuple[int, int] | None = None) -> np.ndarray:
    """Transpose on the second tensor factor."""
    x = as_matrix(x)
    d1, d2 = _split_dims(x.shape[0], dims)
    t = x.reshape(d1, d2, d1, d2).transpose(0, 3, 2, 1)
    return t.reshape(d1 * d2, d1 * d2)


@dataclass(frozen=True)
class CanonicalOperators:
    swap: np.ndarray
    sym: np.ndarray
    asym: np.ndarray
    phi_plus: np.ndarray

    @property
    def phi_plus_projector(self) -> np.ndarray:
        return np.outer(self.phi_plus, self.phi_plus.conj())


def swap_operator(d: int) -> np.ndarray:
    w = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            w[i * d + j, j * d + i] = 1.0
    return w


def canonical_operators(d: int) -> CanonicalOperators:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    w = swap_operator(d)
    eye = np.eye(d * d, dtype=complex)
    phi = np.zeros(d * d, dtype=complex)
    phi[[i * d + i for i in range(d)]] = 1.0 / np.sqrt(d)
    return CanonicalOperators(swap=w, sym=(eye + w) / 2, asym=(eye - w) / 2, phi_plus=phi)


def matrix_unit(n: int, r: int, s: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[r, s] = 1.0
    return e


def gell_mann_basis(n: int) -> list[np.ndarray]:
    """Traceless Hermitian basis with Tr(G^2) = 1: symmetric, antisymmetric, then diagonal."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    sym, asym, diag = [], [], []
    for r in range(n):
        for s in range(r + 1, n):
            sym.append((matrix_unit(n, r, s) + matrix_unit(n, s, r)) / np.sqrt(2))
            asym.append((-1j * matrix_unit(n, r, s) + 1j * matrix_unit(n, s, r)) / np.sqrt(2))
    for l in range(1, n):
        g = np.zeros((n, n), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1.0
        g[l, l] = -l
        diag.append(g / np.sqrt(l * (l + 1)))
    return sym + asym + diag


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of the self-adjoint n x n matrices (Gell-Mann plus 1/sqrt(n))."""
    if n == 1:
        return [np.eye(1, dtype=complex)]
    return gell_mann_basis(n) + [np.eye(n, dtype=complex) / np.sqrt(n)]


def spin_generators(k: int) -> list[np.ndarray]:
    """k anticommuting symmetries of size 2^(k//2)."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    m = k // 2
    gens = []
    for p in range(1, 2 * m + 1):
        block = (p + 1) // 2
        middle = SIGMA_Z if p % 2 == 1 else SIGMA_X
        factors = [SIGMA_Y] * (block - 1) + [middle] + [SIGMA_0] * (m - block)
        gens.append(kron_all(factors))
    if k % 2 == 1:
        gens.append(kron_all([SIGMA_Y] * m))
    return gens


@dataclass(frozen=True)
class QuatMatrix:
    """Quaternionic matrix a = gamma1 + gamma2 j stored as a complex pair."""

    gamma1: np.ndarray
    gamma2: np.ndarray

    @property
    def n(self) -> int:
        return int(self.gamma1.shape[0])

    def is_self_adjoint(self, tol: float | None = None) -> bool:
        g1 = np.asarray(self.gamma1, dtype=complex)
        g2 = np.asarray(self.gamma2, dtype=complex)
        tol = herm_tolerance(np.concatenate([g1, g2])) if tol is None else tol
        return (
            float(np.max(np.abs(g1 - g1.conj().T), initial=0.0)) <= tol
            and float(np.max(np.abs(g2 + g2.T), initial=0.0)) <= tol
        )

    def adjoint(self) -> QuatMatrix:
        return QuatMatrix(self.gamma1.conj().T, -self.gamma2.T)

    def __matmul__(self, other: QuatMatrix) -> QuatMatrix:
        return quat_product(self, other)


def quat_product(a: QuatMatrix, b: QuatMatrix) -> QuatMatrix:
    # j z = conj(z) j for complex z
    g1 = a.gamma1 @ b.gamma1 - a.gamma2 @ b.gamma2.conj()
    g2 = a.gamma1 @ b.gamma2 + a.gamma2 @ b.gamma1.conj()
    return QuatMatrix(g1, g2)


def quaternionic_paulis() -> list[QuatMatrix]:
    zero = np.zeros((2, 2), dtype=complex)
    eps = np.array([[0, -1], [1, 0]], dtype=complex)
    return [
        QuatMatrix(SIGMA_0.copy(), zero.copy()),
        QuatMatrix(SIGMA_Z.copy(), zero.copy()),
        QuatMatrix(SIGMA_X.copy(), zero.copy()),
        QuatMatrix(SIGMA_Y.copy(), zero.copy()),
        QuatMatrix(zero.copy(), eps.copy()),
        QuatMatrix(zero.copy(), 1j * eps),
    ]


def symplectic_form(n: int) -> np.ndarray:
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_embed(q: QuatMatrix, check: bool = True) -> np.ndarray:
    if check and not q.is_self_adjoint():
        raise ValueError("symplectic_embed expects a self-adjoint quaternionic matrix")
    g1 = np.asarray(q.gamma1, dtype=complex)
    g2 = np.asarray(q.gamma2, dtype=complex)
    return np.block([[g1, g2], [-g2.conj(), g1.conj()]])


def _phase_fix(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        if abs(col[idx]) > 0:
            out[:, j] = col * (abs(col[idx]) / col[idx])
    return out


def _canonical_eigenspace(block: np.ndarray) -> np.ndarray:
    """Basis of span(block) obtained by Gram-Schmidt over the columns of its projector.

    Depends only on the subspace, not on the basis ``eigh`` happened to return.
    """
    k = block.shape[1]
    proj = block @ block.conj().T
    basis: list[np.ndarray] = []
    for j in range(proj.shape[0]):
        col = proj[:, j].copy()
        for q in basis:
            col -= q * np.vdot(q, col)
        nrm = float(np.linalg.norm(col))
        if nrm > 1e-6:
            basis.append(col / nrm)
        if len(basis) == k:
            return np.column_stack(basis)
    return block


def hermitian_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues descending with deterministic eigenvectors for degenerate spectra."""
    a = as_hermitian(a)
    w, v = sla.eigh(a)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order].astype(complex)
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and abs(w[stop] - w[start]) <= TOL_EIG:
            stop += 1
        if stop - start > 1:
            v[:, start:stop] = _canonical_eigenspace(v[:, start:stop])
        start = stop
    return w, _phase_fix(v)


def spectral_clusters(w: np.ndarray, gap: float) -> list[np.ndarray]:
    """Group indices of a descending spectrum whose neighbours lie within ``gap``."""
    groups: list[list[int]] = []
    for i, value in enumerate(w):
        if groups and abs(w[groups[-1][-1]] - value) <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g) for g in groups]


def min_eigenvalue(a: np.ndarray) -> float:
    return float(sla.eigvalsh(as_hermitian(a))[0])


def is_psd(a: np.ndarray, tol: float = TOL_PSD) -> bool:
    return min_eigenvalue(a) >= -tol


def hermitian_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = sla.eigh(as_hermitian(a))
    if w[0] < -TOL_PSD:
        raise ValueError(f"hermitian_sqrt needs a PSD input, min eigenvalue {w[0]:.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def numerical_rank(a: np.ndarray, rel_tol: float = TOL_RANK) -> int:
    s = sla.svdvals(np.asarray(a, dtype=complex))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def haar_unitary(d: int, rng: SeededRng) -> np.ndarray:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = sla.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_ket(dim: int, rng: SeededRng) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng: SeededRng, rank: int | None = None) -> np.ndarray:
    """Ginibre-induced density matrix of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: SeededRng) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def superoperator_matrix(fn: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    """Matrix of a linear map on d x d matrices with row-major |A>> = A.ravel()."""
    cols = []
    for r in range(d):
        for s in range(d):
            cols.append(np.asarray(fn(matrix_unit(d, r, s)), dtype=complex).ravel())
    return np.array(cols).T


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=complex).ravel()


def real_vec(a: np.ndarray) -> np.ndarray:
    """Real coordinates whose dot product is Re Tr(a^dagger b)."""
    a = np.asarray(a, dtype=complex)
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def real_unvec(v: np.ndarray, n: int) -> np.ndarray:
    half = n * n
    return (v[:half] + 1j * v[half:]).reshape(n, n)


@dataclass(frozen=True)
class OperatorSubspace:
    """Orthonormal basis of matrices inside an N x N ambient."""

    ambient_dim: int
    basis: tuple[np.ndarray, ...]
    field: str = "real"

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self) -> np.ndarray:
        """Basis as rows of real (or complex) coordinate vectors."""
        if not self.basis:
            width = 2 * self.ambient_dim**2 if self.field == "real" else self.ambient_dim**2
            return np.zeros((0, width), dtype=float if self.field == "real" else complex)
        if self.field == "real":
            return np.array([real_vec(b) for b in self.basis])
        return np.array([vec(b) for b in self.basis])

    def residual(self, x: np.ndarray) -> float:
        """Norm of the component of ``x`` orthogonal to the subspace."""
        q = self.coordinates()
        if self.field == "real":
            v = real_vec(x)
            r = v - q.T @ (q @ v) if q.size else v
        else:
            v = vec(x)
            r = v - q.T @ (q.conj() @ v) if q.size else v
        return float(np.linalg.norm(r))

    def project(self, x: np.ndarray) -> np.ndarray:
        q = self.coordinates()
        if not q.size:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        if self.field == "real":
            return real_unvec(q.T @ (q @ real_vec(x)), self.ambient_dim)
        return (q.T @ (q.conj() @ vec(x))).reshape(self.ambient_dim, self.ambient_dim)

    def contains(self, x: np.ndarray, tol: float = TOL_RANK) -> bool:
        scale = max(float(np.linalg.norm(x)), 1.0)
        return self.residual(x) <= tol * scale


def _mgs(vectors: Sequence[np.ndarray], drop: float) -> list[np.ndarray]:
    basis: list[np.ndarray] = []
    for v in vectors:
        r = np.array(v, copy=True)
        for _ in range(2):
            for q in basis:
                r = r - np.vdot(q, r) * q
        nrm = float(np.linalg.norm(r))
        if nrm > drop:
            basis.append(r / nrm)
    return basis


def orthonormalize_real(span: Sequence[np.ndarray], ambient_dim: int) -> OperatorSubspace:
    """Modified Gram-Schmidt (two passes) under <a, b> = Re Tr(ab)."""
    mats = [as_hermitian(a, "span element") for a in span]
    for a in mats:
        if a.shape != (ambient_dim, ambient_dim):
            raise ValueError(f"span element has shape {a.shape}, ambient is {ambient_dim}")
    if not mats:
        return OperatorSubspace(ambient_dim, ())
    vecs = [real_vec(a) for a in mats]
    scale = max(float(np.linalg.norm(v)) for v in vecs)
    basis = _mgs(vecs, TOL_RANK * scale)
    return OperatorSubspace(ambient_dim, tuple(real_unvec(q, ambient_dim) for q in basis))


def orthonormalize_complex(span: Sequence[np.ndarray], ambient_dim: int) -> OperatorSubspace:
    mats = [as_matrix(a) for a in span]
    if not mats:
        return OperatorSubspace(ambient_dim, (), field="complex")
    vecs = [vec(a) for a in mats]
    scale = max(float(np.linalg.norm(v)) for v in vecs)
    basis = _mgs(vecs, TOL_RANK * scale)
    return OperatorSubspace(
        ambient_dim, tuple(q.reshape(ambient_dim, ambient_dim) for q in basis), field="complex"
    )


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs rows, cols and entries") from exc
    if len(entries) != rows * cols:
        raise ValueError(f"matrix JSON has {len(entries)} entries for a {rows}x{cols} matrix")
    arr = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return as_matrix(arr.reshape(rows, cols))


def herm_coords(stack: np.ndarray) -> np.ndarray:
    """Real coordinates of a stack of Hermitian N x N matrices, isometric for Re Tr(ab)."""
    stack = np.asarray(stack, dtype=complex)
    if stack.ndim == 2:
        stack = stack[None]
    n = stack.shape[-1]
    iu = np.triu_indices(n, 1)
    diag = np.real(np.diagonal(stack, axis1=1, axis2=2))
    upper = stack[:, iu[0], iu[1]] * np.sqrt(2)
    return np.concatenate([diag, upper.real, upper.imag], axis=1)


def herm_from_coords(coords: np.ndarray, n: int) -> np.ndarray:
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    out = np.zeros((coords.shape[0], n, n), dtype=complex)
    idx = np.arange(n)
    out[:, idx, idx] = coords[:, :n]
    upper = (coords[:, n : n + m] + 1j * coords[:, n + m :]) / np.sqrt(2)
    out[:, iu[0], iu[1]] = upper
    out[:, iu[1], iu[0]] = upper.conj()
    return out


def extend_orthonormal(q: np.ndarray, candidates: np.ndarray, drop: float) -> tuple[np.ndarray, np.ndarray]:
    """Append to the orthonormal rows ``q`` the directions of ``candidates`` not yet spanned.

    Returns the enlarged row basis and the newly added rows. Works for real and
    complex coordinates; residual directions with singular value <= ``drop`` are discarded.
    """
    candidates = np.atleast_2d(candidates)
    if candidates.size == 0:
        return q, q[:0]
    r = candidates
    for _ in range(2):
        if q.shape[0]:
            r = r - (r @ q.conj().T) @ q
    norms = np.linalg.norm(r, axis=1)
    r = r[norms > drop]
    if not r.shape[0]:
        return q, q[:0]
    _, s, vh = sla.svd(r, full_matrices=False)
    new = vh[s > drop]
    if q.shape[0] and new.shape[0]:
        new = new - (new @ q.conj().T) @ q
        new = new / np.linalg.norm(new, axis=1)[:, None]
    return np.vstack([q, new]) if q.shape[0] else new, new
