"""Involutive *-antiautomorphisms of finite-dimensional matrix algebras.

Every involution acts on a block-diagonal ambient ``M_{n_1}(C) + ... + M_{n_r}(C)``
stored as one ``N x N`` matrix. Transpose-type maps are ``x -> c x^T c^dagger``
with a unitary twist ``c`` that is symmetric or antisymmetric.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from qjw.config import TOL_DESIGN, TOL_RANK, TOL_UNITARY
from qjw.linalg import SeededRng, matrix_unit, symplectic_form


def _twisted(x: np.ndarray, c: np.ndarray | None) -> np.ndarray:
    if c is None:
        return x.T.copy()
    return c @ x.T @ c.conj().T


def _offsets(blocks: tuple[int, ...]) -> list[int]:
    return [int(v) for v in np.concatenate([[0], np.cumsum(blocks)])]


def split_blocks(x: np.ndarray, blocks: tuple[int, ...]) -> list[np.ndarray]:
    """Diagonal blocks of ``x``; raises if ``x`` has weight off the block diagonal."""
    x = np.asarray(x, dtype=complex)
    total = sum(blocks)
    if x.shape != (total, total):
        raise ValueError(f"element has shape {x.shape}, ambient blocks {blocks} need {total}")
    off = _offsets(blocks)
    parts = [x[off[i] : off[i + 1], off[i] : off[i + 1]] for i in range(len(blocks))]
    rest = x.copy()
    for i in range(len(blocks)):
        rest[off[i] : off[i + 1], off[i] : off[i + 1]] = 0
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.linalg.norm(rest) > TOL_RANK * scale:
        raise ValueError(f"element is not block diagonal for blocks {blocks}")
    return parts


def block_matrix_units(blocks: tuple[int, ...]) -> list[np.ndarray]:
    total = sum(blocks)
    off = _offsets(blocks)
    units = []
    for i, n in enumerate(blocks):
        for r in range(n):
            for s in range(n):
                units.append(matrix_unit(total, off[i] + r, off[i] + s))
    return units


def tensor_apply(
    s_left: np.ndarray, s_right: np.ndarray, x: np.ndarray, dims_in: tuple[int, int], dims_out: tuple[int, int]
) -> np.ndarray:
    """Apply (phi (x) psi) to ``x`` given both maps as row-major superoperator matrices."""
    (a, b), (p, q) = dims_in, dims_out
    t = np.asarray(x, dtype=complex).reshape(a, b, a, b).transpose(0, 2, 1, 3).reshape(a * a, b * b)
    y = s_left @ t @ s_right.T
    return y.reshape(p, p, q, q).transpose(0, 2, 1, 3).reshape(p * q, p * q)


class Involution(ABC):
    """Structural tag of an involutive *-antiautomorphism."""

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @property
    @abstractmethod
    def blocks(self) -> tuple[int, ...]: ...

    @abstractmethod
    def apply(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def conjugate(self) -> Involution:
        """The involution y -> conj(phi(conj(y))) acting on the conjugate algebra."""

    @abstractmethod
    def label(self) -> str: ...

    def algebra_basis(self) -> list[np.ndarray]:
        return block_matrix_units(self.blocks)

    def supports(self, r: int, s: int) -> bool:
        """Whether the matrix unit E_rs lies in the ambient algebra."""
        off = _offsets(self.blocks)
        return any(off[i] <= r < off[i + 1] and off[i] <= s < off[i + 1] for i in range(len(self.blocks)))

    def superoperator(self) -> np.ndarray:
        """Row-major matrix of the map, zero on matrix units outside the ambient algebra."""
        n = self.dim
        cols = []
        for r in range(n):
            for s in range(n):
                if self.supports(r, s):
                    cols.append(self.apply(matrix_unit(n, r, s)).ravel())
                else:
                    cols.append(np.zeros(n * n, dtype=complex))
        return np.array(cols).T

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


@dataclass(frozen=True, eq=False)
class TwistedTranspose(Involution):
    twist: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.twist, dtype=complex)
        n = c.shape[0]
        if c.shape != (n, n):
            raise ValueError(f"twist must be square, got {c.shape}")
        if np.linalg.norm(c @ c.conj().T - np.eye(n)) > TOL_DESIGN * n:
            raise ValueError("twist must be unitary")
        if min(np.linalg.norm(c - c.T), np.linalg.norm(c + c.T)) > TOL_DESIGN * n:
            raise ValueError("twist must be symmetric or antisymmetric")
        object.__setattr__(self, "twist", c)

    @property
    def dim(self) -> int:
        return int(self.twist.shape[0])

    @property
    def blocks(self) -> tuple[int, ...]:
        return (self.dim,)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"element has shape {x.shape}, involution acts on {self.dim}")
        return _twisted(x, self.twist)

    def conjugate(self) -> Involution:
        return TwistedTranspose(self.twist.conj())

    def label(self) -> str:
        return f"TwistedTranspose({self.dim})"


@dataclass(frozen=True)
class Transpose(Involution):
    n: int

    @property
    def dim(self) -> int:
        return self.n

    @property
    def blocks(self) -> tuple[int, ...]:
        return (self.n,)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.n, self.n):
            raise ValueError(f"element has shape {x.shape}, involution acts on {self.n}")
        return x.T.copy()

    def conjugate(self) -> Involution:
        return self

    def label(self) -> str:
        return f"Transpose({self.n})"


@dataclass(frozen=True)
class Symplectic(Involution):
    """x -> -J x^T J on M_{2n}(C)."""

    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def blocks(self) -> tuple[int, ...]:
        return (2 * self.n,)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"element has shape {x.shape}, involution acts on {self.dim}")
        j = symplectic_form(self.n)
        return -j @ x.T @ j

    def conjugate(self) -> Involution:
        return self

    def label(self) -> str:
        return f"Symplectic({self.n})"


@dataclass(frozen=True, eq=False)
class SwapTranspose(Involution):
    """(a, b) -> (c b^T c^dagger, c a^T c^dagger) on M_n(C) + M_n(C)."""

    n: int
    twist: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def blocks(self) -> tuple[int, ...]:
        return (self.n, self.n)

    def apply(self, x: np.ndarray) -> np.ndarray:
        a, b = split_blocks(x, self.blocks)
        return sla.block_diag(_twisted(b, self.twist), _twisted(a, self.twist))

    def conjugate(self) -> Involution:
        return SwapTranspose(self.n, None if self.twist is None else self.twist.conj())

    def label(self) -> str:
        return f"SwapTranspose({self.n})"


@dataclass(frozen=True, eq=False)
class DirectSumOf(Involution):
    parts: tuple[Involution, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a direct sum needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    @property
    def blocks(self) -> tuple[int, ...]:
        return tuple(b for p in self.parts for b in p.blocks)

    def apply(self, x: np.ndarray) -> np.ndarray:
        sizes = tuple(p.dim for p in self.parts)
        pieces = split_blocks(x, sizes)
        return sla.block_diag(*[p.apply(piece) for p, piece in zip(self.parts, pieces)])

    def conjugate(self) -> Involution:
        return DirectSumOf(tuple(p.conjugate() for p in self.parts))

    def label(self) -> str:
        return " + ".join(p.label() for p in self.parts)


@dataclass(frozen=True, eq=False)
class TensorOf(Involution):
    left: Involution
    right: Involution

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    @property
    def blocks(self) -> tuple[int, ...]:
        return tuple(a * b for a in self.left.blocks for b in self.right.blocks)

    def algebra_basis(self) -> list[np.ndarray]:
        return [np.kron(a, b) for a in self.left.algebra_basis() for b in self.right.algebra_basis()]

    def supports(self, r: int, s: int) -> bool:
        nb = self.right.dim
        return self.left.supports(r // nb, s // nb) and self.right.supports(r % nb, s % nb)

    def apply(self, x: np.ndarray) -> np.ndarray:
        dims = (self.left.dim, self.right.dim)
        return tensor_apply(self.left.superoperator(), self.right.superoperator(), x, dims, dims)

    def conjugate(self) -> Involution:
        return TensorOf(self.left.conjugate(), self.right.conjugate())

    def label(self) -> str:
        return f"({self.left.label()}) x ({self.right.label()})"


def random_algebra_element(inv: Involution, rng: SeededRng) -> np.ndarray:
    basis = inv.algebra_basis()
    coeffs = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
    return np.einsum("k,kij->ij", coeffs, np.array(basis))


@dataclass(frozen=True)
class InvolutionCheck:
    label: str
    residuals: dict[str, float]

    @property
    def ok(self) -> bool:
        exact = ("unitary", "self_adjoint")
        return all(
            v <= (TOL_UNITARY if k in exact else TOL_DESIGN) for k, v in self.residuals.items()
        )


def check_involution(inv: Involution, rng: SeededRng, samples: int = 100) -> InvolutionCheck:
    """Relative residuals of the involution axioms on random pairs of the ambient algebra."""
    worst = dict.fromkeys(("involutive", "antiautomorphism", "star", "unitary", "self_adjoint"), 0.0)
    for _ in range(samples):
        x = random_algebra_element(inv, rng)
        y = random_algebra_element(inv, rng)
        nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
        fx, fy = inv.apply(x), inv.apply(y)
        scores = {
            "involutive": np.linalg.norm(inv.apply(fx) - x) / nx,
            "antiautomorphism": np.linalg.norm(inv.apply(x @ y) - fy @ fx) / (nx * ny),
            "star": np.linalg.norm(inv.apply(x.conj().T) - fx.conj().T) / nx,
            "unitary": abs(np.vdot(fx, fy) - np.vdot(x, y)) / (nx * ny),
            "self_adjoint": abs(np.vdot(fx, y) - np.vdot(x, fy)) / (nx * ny),
        }
        for key, value in scores.items():
            worst[key] = max(worst[key], float(value))
    return InvolutionCheck(inv.label(), worst)


def find_twist(gens: list[np.ndarray], sign: int) -> np.ndarray | None:
    """Unitary c with c g^T c^dagger = sign * g for every generator, or None.

    The solution is unique up to phase when the generators span an irreducible
    algebra; the phase is fixed so the first significant entry is real positive.
    """
    n = gens[0].shape[0]
    eye = np.eye(n, dtype=complex)
    rows = [np.kron(eye, g) - sign * np.kron(g, eye) for g in gens]
    null = sla.null_space(np.vstack(rows), rcond=TOL_RANK)
    if null.shape[1] != 1:
        return None
    c = null[:, 0].reshape(n, n)
    c = c * np.sqrt(n) / np.linalg.norm(c)
    flat = c.ravel()
    lead = flat[int(np.argmax(np.abs(flat) > 1e-8))]
    c = c * (abs(lead) / lead)
    if np.linalg.norm(c @ c.conj().T - eye) > TOL_DESIGN * n:
        return None
    if min(np.linalg.norm(c - c.T), np.linalg.norm(c + c.T)) > TOL_DESIGN * n:
        return None
    return c
