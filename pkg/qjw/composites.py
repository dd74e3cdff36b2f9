"""Composites of embedded Jordan algebras: canonical and universal tensor products,
universal envelopes with their canonical involutions, compact structure and
morphism checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from qjw.config import TOL_DESIGN, TOL_PSD, ExceptionalFactorError
from qjw.involutions import (
    DirectSumOf,
    Involution,
    Symplectic,
    SwapTranspose,
    TensorOf,
    Transpose,
    TwistedTranspose,
    block_matrix_units,
    find_twist,
    tensor_apply,
)
from qjw.jordan import (
    EjaDescriptor,
    EmbeddedEjc,
    Summand,
    cstar_closure,
    decompose,
    ejc_from_subspace,
    envelope_name,
    fixed_point_subalg,
    jordan_closure,
    jordan_product,
    jordan_rank,
    pad_block,
    parse_descriptor,
    quaternionic_hermitian_basis,
    real_symmetric_basis,
    spectral_projections,
    standard_embedding,
)
from qjw.linalg import (
    OperatorSubspace,
    SeededRng,
    hermitian_basis,
    make_rng,
    min_eigenvalue,
    quaternionic_paulis,
    real_unvec,
    real_vec,
    spin_generators,
    symplectic_embed,
)

# (A, B) cells of the canonical tensor table run by default; all fit in a 16 x 16 ambient
TABLE_CELLS = (
    ("real:1", "real:1"),
    ("real:1", "real:2"),
    ("real:1", "complex:2"),
    ("real:1", "quat:2"),
    ("real:2", "real:2"),
    ("real:2", "real:3"),
    ("real:3", "real:3"),
    ("real:2", "complex:2"),
    ("real:2", "complex:3"),
    ("real:3", "complex:2"),
    ("real:3", "complex:3"),
    ("real:2", "quat:2"),
    ("real:3", "quat:2"),
    ("complex:2", "complex:2"),
    ("complex:2", "complex:3"),
    ("complex:3", "complex:3"),
    ("complex:2", "quat:2"),
    ("complex:3", "quat:2"),
    ("quat:2", "quat:2"),
)
LONG_TABLE_CELLS = (
    ("quat:2", "quat:3"),
    ("complex:3", "quat:3"),
)

UNIVERSAL_CASES = {
    "qudit": ("complex:2", "complex:2"),
    "quabit": ("quat:2", "quat:2"),
}
UNIVERSAL_EXPECTED = {
    "qudit": "complex:4+complex:4",
    "quabit": "real:16+real:16+real:16+real:16",
}
# ambient size above which universal tensors and envelope checks need --long
SMALL_AMBIENT = 16


def reject_exceptional(*descs: EjaDescriptor | None) -> None:
    for desc in descs:
        if desc is not None and desc.has_exceptional:
            raise ExceptionalFactorError(
                f"{desc.name} has an exceptional factor: no composite satisfying the "
                "composite axioms exists with an exceptional Jordan algebra"
            )


def tensor_generators(a: EmbeddedEjc, b: EmbeddedEjc) -> list[np.ndarray]:
    return [np.kron(x, y) for x in a.generators for y in b.generators]


def canonical_tensor(a: EmbeddedEjc, b: EmbeddedEjc, seed: int = 0) -> tuple[OperatorSubspace, EjaDescriptor]:
    """Jordan closure of the pure tensors of ``a`` and ``b`` together with its identified descriptor."""
    reject_exceptional(a.descriptor, b.descriptor)
    gens = tensor_generators(a, b)
    sub = jordan_closure(gens)
    return sub, EjaDescriptor(tuple(i.summand for i in decompose(sub, gens, seed)))


def predicted_simple_tensor(sa: Summand, sb: Summand) -> Summand | None:
    if sa == Summand("RealSym", 1):
        return sb
    if sb == Summand("RealSym", 1):
        return sa
    if "Spin" in (sa.kind, sb.kind) or "Exceptional" in (sa.kind, sb.kind):
        return None
    order = {"RealSym": 0, "ComplexHerm": 1, "QuatHerm": 2}
    x, y = sorted((sa, sb), key=lambda s: order[s.kind])
    nm = x.n * y.n
    rule = {
        ("RealSym", "RealSym"): ("RealSym", nm),
        ("RealSym", "ComplexHerm"): ("ComplexHerm", nm),
        ("RealSym", "QuatHerm"): ("QuatHerm", nm),
        ("ComplexHerm", "ComplexHerm"): ("ComplexHerm", nm),
        ("ComplexHerm", "QuatHerm"): ("ComplexHerm", 2 * nm),
        ("QuatHerm", "QuatHerm"): ("RealSym", 4 * nm),
    }[(x.kind, y.kind)]
    return Summand(*rule)


def predict_tensor(da: EjaDescriptor, db: EjaDescriptor) -> EjaDescriptor | None:
    """Canonical tensor product predicted by the table, distributed over direct sums."""
    reject_exceptional(da, db)
    out = []
    for sa in da.summands:
        for sb in db.summands:
            cell = predicted_simple_tensor(sa, sb)
            if cell is None:
                return None
            out.append(cell)
    return EjaDescriptor(tuple(out)).canonical()


@dataclass(frozen=True)
class TableCell:
    a: str
    b: str
    predicted: str
    computed: str
    computed_dim: int
    computed_rank: int
    status: str

    def as_dict(self) -> dict:
        return {
            "A": self.a,
            "B": self.b,
            "predicted": self.predicted,
            "computed": self.computed,
            "computed_dim": self.computed_dim,
            "computed_rank": self.computed_rank,
            "status": self.status,
        }


def tensor_cell(a_text: str, b_text: str, seed: int = 0) -> TableCell:
    da, db = parse_descriptor(a_text), parse_descriptor(b_text)
    predicted = predict_tensor(da, db)
    sub, desc = canonical_tensor(standard_embedding(da), standard_embedding(db), seed)
    if predicted is None:
        status = "unpredicted"
    elif predicted == desc.canonical() and predicted.dim == sub.dim:
        status = "ok"
    else:
        status = "mismatch"
    return TableCell(
        da.name,
        db.name,
        "" if predicted is None else predicted.name,
        desc.name,
        sub.dim,
        desc.rank,
        status,
    )


def tensor_table(include_long: bool = False, seed: int = 0) -> list[TableCell]:
    cells = TABLE_CELLS + (LONG_TABLE_CELLS if include_long else ())
    return [tensor_cell(a, b, seed) for a, b in cells]


@dataclass(frozen=True)
class CompositeReport:
    a: str
    b: str
    descriptor: EjaDescriptor
    residuals: dict[str, float]
    minimal_product_rank: int

    @property
    def ok(self) -> bool:
        return all(v <= TOL_DESIGN for v in self.residuals.values())

    def as_dict(self) -> dict:
        return {
            "A": self.a,
            "B": self.b,
            "composite": self.descriptor.name,
            "residuals": dict(self.residuals),
            "minimal_product_rank": self.minimal_product_rank,
            "ok": self.ok,
        }


def _random_element(ejc: EmbeddedEjc, rng: SeededRng) -> np.ndarray:
    x = np.einsum("k,kij->ij", rng.standard_normal(len(ejc.generators)), np.array(ejc.generators))
    return x / np.linalg.norm(x)


def _top_projection(x: np.ndarray) -> np.ndarray:
    return spectral_projections(x)[0][1]


def _projector(sub: OperatorSubspace):
    if sub.field != "real":
        return sub.project
    q = sub.coordinates()
    return lambda x: real_unvec(q.T @ (q @ real_vec(x)), sub.ambient_dim)


def composite_residuals(
    a: EmbeddedEjc, b: EmbeddedEjc, sub: OperatorSubspace, seed: int = 0, samples: int = 20
) -> dict[str, float]:
    """Residuals of the composite identities with every element and product projected into ``sub``.

    All four vanish when ``sub`` is a Jordan algebra holding the pure tensors of ``a`` and ``b``.
    """
    project = _projector(sub)
    rng = make_rng(seed)
    ua, ub = a.unit, b.unit
    sampled = sub.basis[:: max(1, sub.dim // 24)]
    worst = dict.fromkeys(("projection", "inner", "commutation", "main_equation"), 0.0)

    def product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return project(jordan_product(x, y))

    for _ in range(samples):
        x1, x2 = _random_element(a, rng), _random_element(a, rng)
        y1, y2 = _random_element(b, rng), _random_element(b, rng)

        pq = np.kron(_top_projection(x1), _top_projection(y1))
        ppq = project(pq)
        worst["projection"] = max(
            worst["projection"], float(np.linalg.norm(product(ppq, ppq) - ppq)) + sub.residual(pq) / np.linalg.norm(pq)
        )

        t1, t2 = project(np.kron(x1, y1)), project(np.kron(x2, y2))
        lhs = np.vdot(t1, t2).real
        rhs = np.vdot(x1, x2).real * np.vdot(y1, y2).real
        worst["inner"] = max(worst["inner"], float(abs(lhs - rhs)))

        left, right = project(np.kron(x1, ub)), project(np.kron(ua, y1))
        for z in sampled:
            d = product(left, product(right, z)) - product(right, product(left, z))
            worst["commutation"] = max(worst["commutation"], float(np.linalg.norm(d)))

        main = product(left, t2) - project(np.kron(jordan_product(x1, x2), y2))
        worst["main_equation"] = max(worst["main_equation"], float(np.linalg.norm(main)))
    return worst


def composite_property_suite(
    a: EmbeddedEjc, b: EmbeddedEjc, seed: int = 0, samples: int = 20
) -> CompositeReport:
    """Composite identities on the canonical tensor plus the rank of a product of minimal projections."""
    gens = tensor_generators(a, b)
    sub, desc = canonical_tensor(a, b, seed)
    worst = composite_residuals(a, b, sub, seed, samples)
    rng_min = make_rng(seed + 1)
    p_min = _top_projection(_random_element(a, rng_min))
    q_min = _top_projection(_random_element(b, rng_min))
    rank = jordan_rank(sub, np.kron(p_min, q_min), gens, seed)
    return CompositeReport(a.name, b.name, desc, worst, rank)


@dataclass(frozen=True, eq=False)
class Envelope:
    descriptor: EjaDescriptor
    blocks: tuple[int, ...]
    involution: Involution
    embedding: EmbeddedEjc
    expected_dim: int
    computed_dim: int | None = None
    fixes_embedding: float = 0.0
    universally_reversible: bool | None = None

    @property
    def name(self) -> str:
        return envelope_name(self.blocks)

    @property
    def generated(self) -> bool | None:
        if self.computed_dim is None:
            return None
        return self.computed_dim == self.expected_dim

    def as_dict(self) -> dict:
        return {
            "algebra": self.descriptor.name,
            "envelope": self.name,
            "blocks": list(self.blocks),
            "involution": self.involution.label(),
            "expected_dim": self.expected_dim,
            "computed_dim": self.computed_dim,
            "generated": self.generated,
            "fixes_embedding": self.fixes_embedding,
            "universally_reversible": self.universally_reversible,
        }


def _odd_spin_envelope(
    syms: list[np.ndarray], labels: list[str]
) -> tuple[tuple[int, ...], Involution, list[np.ndarray], list[np.ndarray], list[str]]:
    """Envelope of an odd spin factor from one irreducible set of anticommuting symmetries."""
    n = syms[0].shape[0]
    eye = np.eye(2 * n, dtype=complex)
    words = [sla.block_diag(t, -t) for t in syms]
    same = find_twist(syms, +1)
    if same is not None:
        inv: Involution = DirectSumOf((TwistedTranspose(same), TwistedTranspose(same)))
    else:
        flip = find_twist(syms, -1)
        if flip is None:
            raise RuntimeError(f"no canonical involution found for a spin factor of size {n}")
        inv = SwapTranspose(n, flip)
    return (n, n), inv, [eye] + words, words, labels


def _simple_envelope(s: Summand):
    """(blocks, involution, generators, word generators, labels) of the universal representation."""
    if s.kind == "Exceptional":
        reject_exceptional(EjaDescriptor((s,)))
    if s.kind == "RealSym":
        gens = real_symmetric_basis(s.n)
        return (s.n,), Transpose(s.n), gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    if s.kind == "ComplexHerm":
        gens = [sla.block_diag(h, h.T) for h in hermitian_basis(s.n)]
        return (s.n, s.n), SwapTranspose(s.n), gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    if s.kind == "QuatHerm" and s.n == 2:
        syms = [symplectic_embed(q) for q in quaternionic_paulis()[1:]]
        words = [sla.block_diag(t, -t) for t in syms]
        inv = DirectSumOf((Symplectic(2), Symplectic(2)))
        labels = [f"q{i + 1}" for i in range(len(words))]
        return (4, 4), inv, [np.eye(8, dtype=complex)] + words, words, labels
    if s.kind == "QuatHerm":
        gens = [symplectic_embed(q) / np.sqrt(2) for q in quaternionic_hermitian_basis(s.n)]
        return (2 * s.n,), Symplectic(s.n), gens, gens, [f"g{i + 1}" for i in range(len(gens))]
    syms = spin_generators(s.n)
    labels = [f"t{i + 1}" for i in range(len(syms))]
    if s.n % 2 == 1:
        return _odd_spin_envelope(syms, labels)
    n = syms[0].shape[0]
    twist = find_twist(syms, +1)
    if twist is None:
        raise RuntimeError(f"no canonical involution found for Spin({s.n})")
    return (n,), TwistedTranspose(twist), [np.eye(n, dtype=complex)] + syms, syms, labels


def expected_envelope_dim(s: Summand) -> int:
    if s.kind == "RealSym":
        return s.n**2
    if s.kind == "ComplexHerm":
        return 2 * s.n**2
    if s.kind == "QuatHerm":
        return 32 if s.n == 2 else 4 * s.n**2
    if s.kind == "Spin":
        half = s.n // 2
        return 4**half if s.n % 2 == 0 else 2 * 4**half
    raise ExceptionalFactorError("the exceptional algebra has no universal envelope among matrix algebras")


def universal_envelope(desc: EjaDescriptor, verify: bool = True, limit: int = SMALL_AMBIENT) -> Envelope:
    """Universal C*-envelope of ``desc`` with its canonical involution.

    With ``verify`` the universal embedding is closed under products and adjoints
    (ambients up to ``limit``) and compared against the tabulated dimension.
    """
    reject_exceptional(desc)
    parts = [_simple_envelope(s) for s in desc.summands]
    blocks = tuple(b for p in parts for b in p[0])
    sizes = [sum(p[0]) for p in parts]
    total = sum(sizes)
    gens, words, labels = [], [], []
    offset = 0
    for i, (size, (_, _, g, w, lab)) in enumerate(zip(sizes, parts)):
        gens.extend(pad_block(m, offset, total) for m in g)
        words.extend(pad_block(m, offset, total) for m in w)
        labels.extend(lab if len(parts) == 1 else [f"{i + 1}:{x}" for x in lab])
        offset += size
    inv = parts[0][1] if len(parts) == 1 else DirectSumOf(tuple(p[1] for p in parts))
    embedding = EmbeddedEjc(desc, blocks, tuple(gens), tuple(words), tuple(labels))
    expected = sum(expected_envelope_dim(s) for s in desc.summands)
    fixes = max(float(np.linalg.norm(inv.apply(g) - g)) for g in gens)
    computed = None
    reversible = None
    if verify and total <= limit:
        computed = cstar_closure(gens).dim
        reversible = fixed_point_subalg(inv).dim == jordan_closure(gens).dim
    return Envelope(desc, blocks, inv, embedding, expected, computed, fixes, reversible)


def universal_embedding(desc: EjaDescriptor) -> EmbeddedEjc:
    return universal_envelope(desc, verify=False).embedding


@dataclass(frozen=True)
class UniversalTensor:
    a: str
    b: str
    status: str
    ambient_dim: int
    descriptor: EjaDescriptor | None = None
    summand_dims: tuple[int, ...] = field(default_factory=tuple)
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "A": self.a,
            "B": self.b,
            "status": self.status,
            "ambient_dim": self.ambient_dim,
            "composite": None if self.descriptor is None else self.descriptor.name,
            "summand_dims": list(self.summand_dims),
            "reason": self.reason,
        }


def universal_tensor_smallcase(
    da: EjaDescriptor, db: EjaDescriptor, allow_long: bool = False, seed: int = 0
) -> UniversalTensor:
    """Jordan closure of psi(A) (x) psi(B) inside the tensor product of universal envelopes."""
    reject_exceptional(da, db)
    ea, eb = universal_embedding(da), universal_embedding(db)
    ambient = ea.ambient_dim * eb.ambient_dim
    if ambient > SMALL_AMBIENT and not allow_long:
        return UniversalTensor(
            da.name, db.name, "skipped", ambient, reason=f"ambient {ambient} needs the long-run flag"
        )
    gens = tensor_generators(ea, eb)
    sub = jordan_closure(gens)
    infos = decompose(sub, gens, seed)
    desc = EjaDescriptor(tuple(i.summand for i in infos))
    return UniversalTensor(da.name, db.name, "ok", ambient, desc, tuple(i.dim for i in infos))


@dataclass(frozen=True, eq=False)
class CompactStructure:
    blocks: tuple[int, ...]
    epsilon: np.ndarray
    snake_left: float
    snake_right: float
    pairing: float
    min_eigenvalue: float
    invariance: float | None = None

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -TOL_PSD

    @property
    def ok(self) -> bool:
        inv_ok = self.invariance is None or self.invariance <= TOL_DESIGN
        return self.psd and inv_ok and max(self.snake_left, self.snake_right, self.pairing) <= TOL_DESIGN

    def as_dict(self) -> dict:
        return {
            "ambient": envelope_name(self.blocks),
            "snake_left": self.snake_left,
            "snake_right": self.snake_right,
            "pairing": self.pairing,
            "min_eigenvalue": self.min_eigenvalue,
            "invariance": self.invariance,
            "ok": self.ok,
        }


def compact_structure(
    blocks: tuple[int, ...], involution: Involution | None = None, seed: int = 0, samples: int = 50
) -> CompactStructure:
    """epsilon = sum_e e (x) conj(e) over an orthonormal basis, with eta = <epsilon, .|.

    Snake residuals are evaluated on the basis and on random elements of the ambient.
    """
    blocks = tuple(int(b) for b in blocks)
    if involution is not None and tuple(involution.blocks) != blocks:
        raise ValueError(f"involution acts on blocks {involution.blocks}, ambient is {blocks}")
    basis = block_matrix_units(blocks)
    eps = sum(np.kron(e, e.conj()) for e in basis)

    def eta(x: np.ndarray) -> complex:
        return np.vdot(eps, x)

    rng = make_rng(seed)
    tests = list(basis)
    for _ in range(samples):
        c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        tests.append(np.einsum("k,kij->ij", c, np.array(basis)))

    left = right = pairing = 0.0
    for a in tests:
        back = sum(eta(np.kron(a, e.conj())) * e for e in basis)
        left = max(left, float(np.linalg.norm(back - a)) / float(np.linalg.norm(a)))
        bar = a.conj()
        back_bar = sum(eta(np.kron(e, bar)) * e.conj() for e in basis)
        right = max(right, float(np.linalg.norm(back_bar - bar)) / float(np.linalg.norm(a)))
    herm = [(t + t.conj().T) / 2 for t in tests]
    for a, b in zip(herm, herm[1:]):
        err = abs(np.vdot(np.kron(a, b.conj()), eps) - np.trace(a @ b))
        pairing = max(pairing, float(err) / (np.linalg.norm(a) * np.linalg.norm(b)))

    invariance = None
    if involution is not None:
        twin = TensorOf(involution, involution.conjugate())
        invariance = float(np.linalg.norm(twin.apply(eps) - eps))
    return CompactStructure(blocks, eps, left, right, pairing, min_eigenvalue(eps), invariance)


def state_functional(rho: np.ndarray) -> np.ndarray:
    """Row-major superoperator of x -> Tr(rho x) into the trivial algebra C."""
    rho = np.asarray(rho, dtype=complex)
    return rho.T.reshape(1, -1)


def identity_map(n: int) -> np.ndarray:
    return np.eye(n * n, dtype=complex)


@dataclass(frozen=True)
class CjpVerdict:
    min_choi_eigenvalue: float
    intertwine: float
    partners: dict[str, float]

    @property
    def completely_positive(self) -> bool:
        return self.min_choi_eigenvalue >= -TOL_PSD

    @property
    def ok(self) -> bool:
        return (
            self.completely_positive
            and self.intertwine <= TOL_DESIGN
            and all(v <= TOL_DESIGN for v in self.partners.values())
        )

    def as_dict(self) -> dict:
        return {
            "completely_positive": self.completely_positive,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "intertwine": self.intertwine,
            "partners": dict(self.partners),
            "ok": self.ok,
        }


def cjp_intertwiner_check(
    phi: np.ndarray,
    inv_a: Involution,
    inv_b: Involution,
    partners: tuple[EmbeddedEjc, ...] = (),
    max_samples: int = 64,
) -> CjpVerdict:
    """Complete positivity, intertwining and Jordan preservation against test partners.

    The source and target Jordan algebras are the self-adjoint fixed points of
    ``inv_a`` and ``inv_b``; ``phi`` is a row-major superoperator matrix.
    """
    na, nb = inv_a.dim, inv_b.dim
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (nb * nb, na * na):
        raise ValueError(f"map has shape {phi.shape}, expected {(nb * nb, na * na)}")

    choi = np.zeros((na * nb, na * nb), dtype=complex)
    for r in range(na):
        for s in range(na):
            unit = np.zeros((na, na), dtype=complex)
            unit[r, s] = 1.0
            choi += np.kron(unit, phi[:, r * na + s].reshape(nb, nb))
    choi_min = min_eigenvalue(choi)

    mask = np.array([inv_a.supports(r, s) for r in range(na) for s in range(na)])
    diff = (inv_b.superoperator() @ phi - phi @ inv_a.superoperator())[:, mask]
    intertwine = float(np.linalg.norm(diff)) / max(1.0, float(np.linalg.norm(phi)))

    source = ejc_from_subspace(fixed_point_subalg(inv_a))
    target = ejc_from_subspace(fixed_point_subalg(inv_b))
    results: dict[str, float] = {}
    for i, partner in enumerate(partners):
        nc = partner.ambient_dim
        lhs = jordan_closure(tensor_generators(source, partner))
        rhs = jordan_closure(tensor_generators(target, partner))
        worst = 0.0
        for x in lhs.basis[: max_samples]:
            y = tensor_apply(phi, identity_map(nc), x, (na, nc), (nb, nc))
            worst = max(worst, rhs.residual(y))
        results[f"{i}:{partner.name}"] = worst
    return CjpVerdict(choi_min, intertwine, results)


@dataclass(frozen=True)
class PropertyCheck:
    left: str
    right: str
    left_dim: int
    right_dim: int

    @property
    def ok(self) -> bool:
        return self.left == self.right and self.left_dim == self.right_dim


def associativity_check(a: EmbeddedEjc, b: EmbeddedEjc, c: EmbeddedEjc, seed: int = 0) -> PropertyCheck:
    """(A . B) . C against A . (B . C) by dimension and identified descriptor."""
    ab, _ = canonical_tensor(a, b, seed)
    left, left_desc = canonical_tensor(ejc_from_subspace(ab), c, seed)
    bc, _ = canonical_tensor(b, c, seed)
    right, right_desc = canonical_tensor(a, ejc_from_subspace(bc), seed)
    return PropertyCheck(
        left_desc.canonical().name, right_desc.canonical().name, left.dim, right.dim
    )


def distributivity_check(
    da: EjaDescriptor, db: EjaDescriptor, dc: EjaDescriptor, seed: int = 0
) -> PropertyCheck:
    """A . (B + C) against (A . B) + (A . C)."""
    ea = standard_embedding(da)
    whole, whole_desc = canonical_tensor(ea, standard_embedding(db + dc), seed)
    ab, ab_desc = canonical_tensor(ea, standard_embedding(db), seed)
    ac, ac_desc = canonical_tensor(ea, standard_embedding(dc), seed)
    return PropertyCheck(
        whole_desc.canonical().name, (ab_desc + ac_desc).canonical().name, whole.dim, ab.dim + ac.dim
    )
