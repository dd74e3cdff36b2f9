"""Euclidean Jordan algebras realized inside complex matrix algebras.

Descriptors name a direct sum of simple algebras; embeddings put generators in
a block-diagonal ambient; closures compute the Jordan (or C*) subalgebra they
generate; identification recovers a descriptor from a closure by the invariants
(dimension, rank, centre) only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg as sla

from qjw.config import (
    CLOSURE_ROUND_CAP,
    CLUSTER_GAP,
    TOL_RANK,
    WORD_SAMPLES,
    ClosureCapExceeded,
    ExceptionalFactorError,
    IdentificationError,
)
from qjw.involutions import Involution
from qjw.linalg import (
    OperatorSubspace,
    QuatMatrix,
    as_hermitian,
    extend_orthonormal,
    herm_coords,
    herm_from_coords,
    hermitian_basis,
    make_rng,
    matrix_unit,
    real_vec,
    spectral_clusters,
    spin_generators,
    symplectic_embed,
)

KINDS = ("RealSym", "ComplexHerm", "QuatHerm", "Spin", "Exceptional")

_ALIASES = {
    "real": "RealSym",
    "realsym": "RealSym",
    "r": "RealSym",
    "complex": "ComplexHerm",
    "complexherm": "ComplexHerm",
    "c": "ComplexHerm",
    "quat": "QuatHerm",
    "quatherm": "QuatHerm",
    "h": "QuatHerm",
    "spin": "Spin",
    "v": "Spin",
    "exceptional": "Exceptional",
    "octonion": "Exceptional",
    "o": "Exceptional",
}

_FIELD_LETTER = {"RealSym": "R", "ComplexHerm": "C", "QuatHerm": "H"}

# floats per batch of products before the closure flushes into the basis
_BATCH_FLOATS = 1 << 22


@dataclass(frozen=True, order=True)
class Summand:
    kind: str
    n: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown simple kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise ValueError(f"{self.kind} size must be >= 1, got {self.n}")
        if self.kind == "Spin" and self.n < 2:
            raise ValueError(f"spin factors need k >= 2, got {self.n}")
        if self.kind == "Exceptional" and self.n != 3:
            raise ValueError("the exceptional algebra only exists for n = 3")
        if self.n == 1 and self.kind in _FIELD_LETTER:
            object.__setattr__(self, "kind", "RealSym")

    @property
    def dim(self) -> int:
        n = self.n
        return {
            "RealSym": n * (n + 1) // 2,
            "ComplexHerm": n * n,
            "QuatHerm": n * (2 * n - 1),
            "Spin": n + 1,
            "Exceptional": 27,
        }[self.kind]

    @property
    def rank(self) -> int:
        if self.kind == "Spin":
            return 2
        return self.n

    @property
    def name(self) -> str:
        return f"{self.kind}({self.n})"

    def sort_key(self) -> tuple[int, int]:
        return KINDS.index(self.kind), self.n


@dataclass(frozen=True)
class EjaDescriptor:
    summands: tuple[Summand, ...]

    def __post_init__(self) -> None:
        if not self.summands:
            raise ValueError("a descriptor needs at least one summand")
        object.__setattr__(self, "summands", tuple(self.summands))

    @classmethod
    def simple(cls, kind: str, n: int) -> EjaDescriptor:
        return cls((Summand(kind, n),))

    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.summands)

    @property
    def rank(self) -> int:
        return sum(s.rank for s in self.summands)

    @property
    def is_simple(self) -> bool:
        return len(self.summands) == 1

    @property
    def has_exceptional(self) -> bool:
        return any(s.kind == "Exceptional" for s in self.summands)

    @property
    def name(self) -> str:
        return " ⊕ ".join(s.name for s in self.summands)

    def canonical(self) -> EjaDescriptor:
        return EjaDescriptor(tuple(sorted(self.summands, key=Summand.sort_key)))

    def __add__(self, other: EjaDescriptor) -> EjaDescriptor:
        return EjaDescriptor(self.summands + other.summands)

    def __str__(self) -> str:
        return self.name


def parse_descriptor(text: str) -> EjaDescriptor:
    """Parse ``quat:2``, ``spin:5``, ``exceptional`` or sums such as ``real:3+complex:2``."""
    summands = []
    for token in text.replace(",", "+").split("+"):
        token = token.strip()
        if not token:
            raise ValueError(f"empty summand in descriptor {text!r}")
        name, _, size = token.partition(":")
        kind = _ALIASES.get(name.strip().lower())
        if kind is None:
            raise ValueError(f"unknown algebra kind {name!r} in {text!r}")
        if kind == "Exceptional" and not size:
            size = "3"
        try:
            n = int(size)
        except ValueError as exc:
            raise ValueError(f"bad size {size!r} in {text!r}") from exc
        summands.append(Summand(kind, n))
    return EjaDescriptor(tuple(summands))


def descriptor_to_json(desc: EjaDescriptor) -> dict:
    return {"summands": [{"kind": s.kind, "n": s.n} for s in desc.summands]}


def descriptor_from_json(obj: dict) -> EjaDescriptor:
    try:
        return EjaDescriptor(tuple(Summand(str(s["kind"]), int(s["n"])) for s in obj["summands"]))
    except (KeyError, TypeError) as exc:
        raise ValueError("descriptor JSON needs summands with kind and n") from exc


def envelope_name(blocks: tuple[int, ...]) -> str:
    return " ⊕ ".join(f"M{b}(C)" for b in blocks)


@dataclass(frozen=True)
class SpinElement:
    k: int
    scalar: float
    vector: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.vector, dtype=float).ravel()
        if vec.shape != (self.k,):
            raise ValueError(f"spin vector must have length {self.k}, got {vec.shape[0]}")
        if not np.all(np.isfinite(vec)) or not np.isfinite(self.scalar):
            raise ValueError("spin element entries must be finite")
        object.__setattr__(self, "vector", vec)

    @classmethod
    def unit(cls, k: int) -> SpinElement:
        return cls(k, 1.0, np.zeros(k))

    @classmethod
    def symmetry(cls, k: int, a: int) -> SpinElement:
        v = np.zeros(k)
        v[a] = 1.0
        return cls(k, 0.0, v)


def spin_product(x: SpinElement, y: SpinElement) -> SpinElement:
    if x.k != y.k:
        raise ValueError(f"spin factor mismatch: V{x.k} vs V{y.k}")
    return SpinElement(
        x.k,
        x.scalar * y.scalar + float(x.vector @ y.vector),
        x.scalar * y.vector + y.scalar * x.vector,
    )


def spin_embed(x: SpinElement) -> np.ndarray:
    gens = spin_generators(x.k)
    out = x.scalar * np.eye(gens[0].shape[0], dtype=complex)
    for lam, g in zip(x.vector, gens):
        out = out + lam * g
    return out


def jordan_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return (a @ b + b @ a) / 2


@dataclass(frozen=True, eq=False)
class EmbeddedEjc:
    """A Jordan algebra given by self-adjoint generators in a block-diagonal ambient."""

    descriptor: EjaDescriptor | None
    blocks: tuple[int, ...]
    generators: tuple[np.ndarray, ...]
    word_generators: tuple[np.ndarray, ...] = ()
    word_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = self.ambient_dim
        gens = tuple(as_hermitian(g, "generator") for g in self.generators)
        for g in gens:
            if g.shape != (n, n):
                raise ValueError(f"generator has shape {g.shape}, ambient is {n}")
        object.__setattr__(self, "generators", gens)
        if not self.word_generators:
            object.__setattr__(self, "word_generators", gens)
            object.__setattr__(self, "word_labels", tuple(f"g{i + 1}" for i in range(len(gens))))

    @property
    def ambient_dim(self) -> int:
        return int(sum(self.blocks))

    @property
    def unit(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex)

    @property
    def name(self) -> str:
        return "unidentified" if self.descriptor is None else self.descriptor.name


def real_symmetric_basis(n: int) -> list[np.ndarray]:
    out = []
    for r in range(n):
        out.append(matrix_unit(n, r, r))
        for s in range(r + 1, n):
            out.append((matrix_unit(n, r, s) + matrix_unit(n, s, r)) / np.sqrt(2))
    return out


def quaternionic_hermitian_basis(n: int) -> list[QuatMatrix]:
    zero = np.zeros((n, n), dtype=complex)
    out = [QuatMatrix(h, zero.copy()) for h in hermitian_basis(n)]
    for r in range(n):
        for s in range(r + 1, n):
            a = (matrix_unit(n, r, s) - matrix_unit(n, s, r)) / np.sqrt(2)
            out.append(QuatMatrix(zero.copy(), a))
            out.append(QuatMatrix(zero.copy(), 1j * a))
    return out


def _simple_embedding(s: Summand) -> tuple[int, list[np.ndarray], list[np.ndarray], list[str]]:
    if s.kind == "Exceptional":
        raise ExceptionalFactorError(
            "the exceptional algebra has no embedding in a matrix algebra; "
            "no composite with an exceptional factor exists"
        )
    if s.kind == "RealSym":
        gens = real_symmetric_basis(s.n)
        return s.n, gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    if s.kind == "ComplexHerm":
        gens = hermitian_basis(s.n)
        return s.n, gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    if s.kind == "QuatHerm":
        gens = [symplectic_embed(q) / np.sqrt(2) for q in quaternionic_hermitian_basis(s.n)]
        return 2 * s.n, gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    sym = spin_generators(s.n)
    size = sym[0].shape[0]
    return size, [np.eye(size, dtype=complex)] + sym, sym, [f"t{i + 1}" for i in range(len(sym))]


def pad_block(m: np.ndarray, offset: int, total: int) -> np.ndarray:
    out = np.zeros((total, total), dtype=complex)
    k = m.shape[0]
    out[offset : offset + k, offset : offset + k] = m
    return out


def standard_embedding(desc: EjaDescriptor) -> EmbeddedEjc:
    parts = [_simple_embedding(s) for s in desc.summands]
    blocks = tuple(p[0] for p in parts)
    total = sum(blocks)
    gens: list[np.ndarray] = []
    words: list[np.ndarray] = []
    labels: list[str] = []
    offset = 0
    for i, (size, g, w, lab) in enumerate(parts):
        gens.extend(pad_block(m, offset, total) for m in g)
        words.extend(pad_block(m, offset, total) for m in w)
        labels.extend(lab if len(parts) == 1 else [f"{i + 1}:{x}" for x in lab])
        offset += size
    return EmbeddedEjc(desc, blocks, tuple(gens), tuple(words), tuple(labels))


def ejc_from_subspace(sub: OperatorSubspace, descriptor: EjaDescriptor | None = None) -> EmbeddedEjc:
    return EmbeddedEjc(descriptor, (sub.ambient_dim,), sub.basis)


def _stack(mats) -> np.ndarray:
    stack = np.array([np.asarray(m, dtype=complex) for m in mats])
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError("generators must be square matrices of a common size")
    return stack


def _batch_size(basis_len: int, n: int) -> int:
    return max(1, _BATCH_FLOATS // max(1, basis_len * n * n))


def _close(q, new, to_mats, to_coords, products, cap: int, what: str):
    rounds = 0
    while new.shape[0]:
        rounds += 1
        if rounds > cap:
            raise ClosureCapExceeded(f"{what} closure did not stabilize within {cap} rounds (dim {q.shape[0]})")
        basis = to_mats(q)
        step = _batch_size(basis.shape[0], basis.shape[1])
        fresh = []
        for start in range(0, new.shape[0], step):
            coords = to_coords(products(to_mats(new[start : start + step]), basis))
            drop = TOL_RANK * max(1.0, float(np.max(np.linalg.norm(coords, axis=1))))
            q, added = extend_orthonormal(q, coords, drop)
            if added.shape[0]:
                fresh.append(added)
        new = np.vstack(fresh) if fresh else q[:0]
    return q


def _jordan_products(xs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    prods = (xs[:, None] @ basis[None] + basis[None] @ xs[:, None]) / 2
    return prods.reshape(-1, *basis.shape[1:])


def _associative_products(xs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    left = (xs[:, None] @ basis[None]).reshape(-1, *basis.shape[1:])
    right = (basis[None] @ xs[:, None]).reshape(-1, *basis.shape[1:])
    return np.concatenate([left, right, xs.conj().transpose(0, 2, 1)])


def jordan_closure(gens, cap: int = CLOSURE_ROUND_CAP) -> OperatorSubspace:
    """Smallest Jordan subalgebra containing ``gens``, as a real orthonormal basis."""
    stack = _stack([as_hermitian(g, "generator") for g in gens])
    n = stack.shape[1]
    coords = herm_coords(stack)
    q, new = extend_orthonormal(
        np.zeros((0, n * n)), coords, TOL_RANK * max(1.0, float(np.max(np.linalg.norm(coords, axis=1))))
    )
    q = _close(q, new, lambda c: herm_from_coords(c, n), herm_coords, _jordan_products, cap, "Jordan")
    return OperatorSubspace(n, tuple(herm_from_coords(q, n)), field="real")


def cstar_closure(gens, cap: int = CLOSURE_ROUND_CAP) -> OperatorSubspace:
    """Smallest *-subalgebra containing ``gens``; ``dim`` is its complex dimension."""
    stack = _stack(gens)
    n = stack.shape[1]
    stack = np.concatenate([stack, stack.conj().transpose(0, 2, 1)])
    coords = stack.reshape(stack.shape[0], -1)
    q, new = extend_orthonormal(
        np.zeros((0, n * n), dtype=complex),
        coords,
        TOL_RANK * max(1.0, float(np.max(np.linalg.norm(coords, axis=1)))),
    )

    def to_mats(c):
        return c.reshape(-1, n, n)

    def to_coords(m):
        return m.reshape(m.shape[0], -1)

    q = _close(q, new, to_mats, to_coords, _associative_products, cap, "C*")
    return OperatorSubspace(n, tuple(to_mats(q)), field="complex")


def spectral_projections(a: np.ndarray, gap: float = CLUSTER_GAP) -> list[tuple[float, np.ndarray]]:
    """(eigenvalue, projection) pairs of a Hermitian matrix, clustering within ``gap``."""
    w, v = sla.eigh(as_hermitian(a))
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    out = []
    for idx in spectral_clusters(w, gap * max(1.0, float(np.max(np.abs(w))))):
        vecs = v[:, idx]
        out.append((float(np.mean(w[idx])), vecs @ vecs.conj().T))
    return out


def classify_simple(dim: int, rank: int) -> Summand:
    """Simple Jordan algebra with the given (dimension, rank) invariants."""
    if rank == 1 and dim == 1:
        return Summand("RealSym", 1)
    if rank == 2:
        # V2, V3 and V5 are reported under their matrix names
        matrix = {3: "RealSym", 4: "ComplexHerm", 6: "QuatHerm"}
        if dim in matrix:
            return Summand(matrix[dim], 2)
        if dim >= 3:
            return Summand("Spin", dim - 1)
    if rank >= 3:
        if dim == rank * (rank + 1) // 2:
            return Summand("RealSym", rank)
        if dim == rank * rank:
            return Summand("ComplexHerm", rank)
        if dim == rank * (2 * rank - 1):
            return Summand("QuatHerm", rank)
        if rank == 3 and dim == 27:
            return Summand("Exceptional", 3)
    raise IdentificationError(f"no simple Euclidean Jordan algebra has dimension {dim} and rank {rank}")


@dataclass(frozen=True, eq=False)
class SummandInfo:
    summand: Summand
    dim: int
    rank: int
    projection: np.ndarray = field(repr=False)


def decompose(sub: OperatorSubspace, generators=None, seed: int = 0) -> list[SummandInfo]:
    """Central decomposition of a Jordan-closed subspace into classified simple summands.

    The centre is the set of elements commuting with the generators (all basis
    elements when none are given); its spectral projections split the algebra.
    """
    if sub.field != "real" or not sub.basis:
        raise ValueError("decompose needs a non-empty real Jordan subspace")
    basis = np.array(sub.basis)
    k, n = basis.shape[0], basis.shape[1]
    rng = make_rng(seed)
    generic = np.einsum("k,kij->ij", rng.standard_normal(k), basis)
    w, v = sla.eigh(generic)
    support = v[:, np.abs(w) > TOL_RANK * max(1.0, float(np.max(np.abs(w))))]
    unit = support @ support.conj().T
    if not sub.contains(unit):
        raise IdentificationError("subspace has no unit")

    gens = basis if generators is None else _stack(generators)
    gram = np.zeros((k, k))
    for g in gens:
        comm = (basis @ g - g @ basis).reshape(k, -1)
        gram += (comm.conj() @ comm.T).real
    cw, cv = sla.eigh(gram)
    centre = cv[:, cw <= TOL_RANK * max(1.0, float(cw[-1]))]
    if centre.shape[1] == 0:
        raise IdentificationError("centre of the subspace is empty")

    z = np.einsum("k,kij->ij", centre @ rng.standard_normal(centre.shape[1]), basis)
    shifted = z + (np.linalg.norm(z, 2) + 1.0) * unit
    parts = [(lam, p) for lam, p in spectral_projections(shifted) if lam > 0.5]
    if len(parts) != centre.shape[1]:
        raise IdentificationError(
            f"centre has dimension {centre.shape[1]} but {len(parts)} central projections were resolved"
        )

    out = []
    for _, p in parts:
        local = herm_coords(p @ basis @ p)
        s = sla.svdvals(local)
        dim = int(np.sum(s > TOL_RANK * max(1.0, float(s[0]))))
        pw, pv = sla.eigh(p)
        frame = pv[:, pw > 0.5]
        ev = sla.eigvalsh(frame.conj().T @ generic @ frame)[::-1]
        rank = len(spectral_clusters(ev, CLUSTER_GAP * max(1.0, float(np.max(np.abs(ev))))))
        out.append(SummandInfo(classify_simple(dim, rank), dim, rank, p))
    out.sort(key=lambda info: info.summand.sort_key())
    return out


def identify_eja(sub: OperatorSubspace, generators=None, seed: int = 0) -> EjaDescriptor:
    """Descriptor of a Jordan-closed subspace, identified up to (dimension, rank, centre)."""
    return EjaDescriptor(tuple(info.summand for info in decompose(sub, generators, seed)))


def jordan_rank(sub: OperatorSubspace, projection: np.ndarray, generators=None, seed: int = 0) -> int:
    """Jordan rank of a projection lying in ``sub`` (sum of its ranks in each summand)."""
    total = 0.0
    for info in decompose(sub, generators, seed):
        tr_unit = float(np.trace(info.projection).real)
        tr_p = float(np.trace(info.projection @ projection @ info.projection).real)
        total += tr_p * info.rank / tr_unit
    return int(round(total))


def fixed_point_subalg(inv: Involution) -> OperatorSubspace:
    """Self-adjoint fixed points of ``inv`` inside its ambient algebra."""
    n = inv.dim
    units = np.array(inv.algebra_basis())
    herm = np.concatenate([units + units.conj().transpose(0, 2, 1), 1j * (units - units.conj().transpose(0, 2, 1))])
    s = inv.superoperator()
    images = (herm.reshape(herm.shape[0], -1) @ s.T).reshape(herm.shape)
    coords = herm_coords((herm + images) / 2)
    q, _ = extend_orthonormal(
        np.zeros((0, n * n)), coords, TOL_RANK * max(1.0, float(np.max(np.linalg.norm(coords, axis=1))))
    )
    return OperatorSubspace(n, tuple(herm_from_coords(q, n)), field="real")


@dataclass(frozen=True)
class ReversibilityResult:
    reversible: bool
    witness: tuple[str, ...] | None
    words_checked: int

    @property
    def witness_text(self) -> str:
        return "" if self.witness is None else " ".join(self.witness)


def check_reversible(
    ejc: EmbeddedEjc, max_word_len: int = 4, seed: int = 0, samples: int = WORD_SAMPLES
) -> ReversibilityResult:
    """Test w + reverse(w) against the Jordan closure for words in the generators.

    Words are enumerated exhaustively up to length 4 and sampled beyond it.
    """
    if max_word_len < 2:
        raise ValueError(f"max_word_len must be >= 2, got {max_word_len}")
    sub = jordan_closure(ejc.generators)
    q = sub.coordinates()
    gens = ejc.word_generators
    g = len(gens)
    rng = make_rng(seed)
    checked = 0
    for m in range(2, max_word_len + 1):
        if m <= 4:
            words = itertools.product(range(g), repeat=m)
        else:
            words = (tuple(int(i) for i in row) for row in rng.integers(0, g, size=(samples, m)))
        for word in words:
            checked += 1
            w = reduce(np.matmul, (gens[i] for i in word))
            sym = w + w.conj().T
            v = real_vec(sym)
            res = float(np.linalg.norm(v - q.T @ (q @ v)))
            if res > TOL_RANK * max(1.0, float(np.linalg.norm(v))):
                return ReversibilityResult(False, tuple(ejc.word_labels[i] for i in word), checked)
    return ReversibilityResult(True, None, checked)


def quadratic_map(a: np.ndarray):
    """U_a = 2 L_a^2 - L_{a^2} as a callable on matrices."""
    a = as_hermitian(a, "a")
    a2 = a @ a

    def apply(x: np.ndarray) -> np.ndarray:
        return 2 * jordan_product(a, jordan_product(a, x)) - jordan_product(a2, x)

    return apply


def _basis_for(a: np.ndarray, sub: OperatorSubspace | None) -> tuple[np.ndarray, ...]:
    if sub is None:
        return tuple(hermitian_basis(a.shape[0]))
    return sub.basis


def quadratic_rep(a: np.ndarray, sub: OperatorSubspace | None = None) -> np.ndarray:
    """Matrix of U_a on the orthonormal basis of ``sub`` (all Hermitian matrices by default)."""
    fn = quadratic_map(a)
    basis = _basis_for(np.asarray(a), sub)
    return np.array([[float(np.vdot(bi, fn(bj)).real) for bj in basis] for bi in basis])


def multiplication_operator(a: np.ndarray, sub: OperatorSubspace | None = None) -> np.ndarray:
    """Matrix of L_a: x -> a . x on the orthonormal basis of ``sub``."""
    a = as_hermitian(a, "a")
    basis = _basis_for(a, sub)
    return np.array([[float(np.vdot(bi, jordan_product(a, bj)).real) for bj in basis] for bi in basis])
