"""Conical 2-designs: constants, the five-condition verifier and the standard builders."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from qjw.bloch import BlochVector, simplex_gram, traceless_basis, vectors_from_gram
from qjw.config import HAAR_SAMPLES, TOL_DESIGN, TOL_PSD, TOL_SPAN, ReconstructionError
from qjw.linalg import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_hermitian,
    canonical_operators,
    haar_unitary,
    hermitian_sqrt,
    make_rng,
    matrix_from_json,
    matrix_to_json,
    min_eigenvalue,
    superoperator_matrix,
    vec,
)


@dataclass(frozen=True)
class Povm:
    d: int
    effects: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        total = sum(self.effects)
        if np.max(np.abs(total - np.eye(self.d))) > TOL_DESIGN:
            raise ValueError("POVM effects do not sum to the identity")
        for e in self.effects:
            if min_eigenvalue(e) < -TOL_PSD:
                raise ValueError("POVM effect is not PSD")


@dataclass(frozen=True)
class ConicalDesign:
    d: int
    ops: tuple[np.ndarray, ...]
    k_s: float
    k_a: float
    traces: tuple[float, ...]
    t: float
    kappas: tuple[float, ...]
    kappa: float

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def k_plus(self) -> float:
        return (self.k_s + self.k_a) / 2

    @property
    def k_minus(self) -> float:
        return (self.k_s - self.k_a) / 2

    def bloch_vectors(self) -> list[BlochVector]:
        eye = np.eye(self.d, dtype=complex)
        return [BlochVector(self.d, self.d * a / tj - eye) for a, tj in zip(self.ops, self.traces)]


@dataclass(frozen=True)
class CandidateProjector:
    n: int
    d: int
    P: np.ndarray

    def validate(self, tol: float = TOL_DESIGN) -> None:
        P, n, d = np.asarray(self.P, dtype=float), self.n, self.d
        if P.shape != (n, n):
            raise ValueError(f"projector must be {n}x{n}, got {P.shape}")
        if np.max(np.abs(P - P.T)) > tol:
            raise ValueError("candidate projector is not symmetric")
        if np.max(np.abs(P @ P - P)) > tol:
            raise ValueError("candidate projector is not idempotent")
        if abs(np.trace(P) - (d * d - 1)) > tol * n:
            raise ValueError(f"candidate projector trace {np.trace(P):.6g} != d^2 - 1 = {d * d - 1}")
        if np.max(np.abs(P.sum(axis=1))) > tol * n:
            raise ValueError("candidate projector rows do not sum to zero")
        if np.max(np.abs(np.diag(P) - (d * d - 1) / n)) > tol:
            raise ValueError("candidate projector diagonal is not (d^2 - 1)/n")


@dataclass
class DesignReport:
    d: int
    n: int
    k_s: float
    k_a: float
    residuals: dict[str, float] = field(default_factory=dict)
    passed: dict[str, bool] = field(default_factory=dict)
    k_plus_iii: float = 0.0
    k_minus_iii: float = 0.0
    k_plus_v: float = 0.0
    k_minus_v: float = 0.0
    spanning: bool = False

    @property
    def ok(self) -> bool:
        return self.spanning and all(self.passed.values())

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "ks": self.k_s,
            "ka": self.k_a,
            "k_plus": {"iii": self.k_plus_iii, "v": self.k_plus_v},
            "k_minus": {"iii": self.k_minus_iii, "v": self.k_minus_v},
            "residuals": dict(self.residuals),
            "passed": dict(self.passed),
            "spanning": self.spanning,
            "ok": self.ok,
        }


def _check_ops(ops, require_psd: bool = True) -> tuple[int, list[np.ndarray]]:
    ops = [as_hermitian(a, "design element") for a in ops]
    if not ops:
        raise ValueError("design needs at least one operator")
    d = ops[0].shape[0]
    for a in ops:
        if a.shape != (d, d):
            raise ValueError(f"design elements must all be {d}x{d}, got {a.shape}")
        if np.linalg.norm(a) <= TOL_DESIGN:
            raise ValueError("design elements must be nonzero")
        if require_psd and min_eigenvalue(a) < -TOL_PSD:
            raise ValueError("design elements must be PSD")
    return d, ops


def design_constants(ops) -> tuple[float, float]:
    """(k_s, k_a) from the trace identities of the symmetric/antisymmetric split."""
    d, ops = _check_ops(ops)
    return _trace_constants(d, ops)


def _trace_constants(d: int, ops: list[np.ndarray]) -> tuple[float, float]:
    s1 = sum(float(np.trace(a).real) ** 2 for a in ops)
    s2 = sum(float(np.trace(a @ a).real) for a in ops)
    k_s = (s1 + s2) / (d * (d + 1))
    k_a = (s1 - s2) / (d * (d - 1)) if d > 1 else k_s
    return k_s, k_a


def design_from_ops(ops) -> ConicalDesign:
    d, ops = _check_ops(ops)
    k_s, k_a = design_constants(ops)
    traces = [float(np.trace(a).real) for a in ops]
    n = len(ops)
    t = float(np.sqrt(sum(tj**2 for tj in traces) / n))
    eye = np.eye(d, dtype=complex)
    kappas = []
    for a, tj in zip(ops, traces):
        b = d * a / tj - eye
        kappas.append(float(np.sqrt(max(np.trace(b @ b).real, 0.0) / (d * (d - 1)))))
    kappa = float(np.sqrt(sum(tj**2 * kj**2 for tj, kj in zip(traces, kappas)) / (n * t**2)))
    return ConicalDesign(d, tuple(ops), k_s, k_a, tuple(traces), t, tuple(kappas), kappa)


def _fit_two(target: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Least-squares coefficients of target ~ c1 x1 + c2 x2 under the HS inner product."""
    g = np.array(
        [[np.vdot(x1, x1), np.vdot(x1, x2)], [np.vdot(x2, x1), np.vdot(x2, x2)]], dtype=complex
    )
    rhs = np.array([np.vdot(x1, target), np.vdot(x2, target)], dtype=complex)
    c = np.linalg.solve(g, rhs).real
    return float(c[0]), float(c[1]), target - c[0] * x1 - c[1] * x2


def verify_design(ops, tol: float = TOL_DESIGN, seed: int = 0) -> DesignReport:
    """Check all five equivalent conditions; residuals are relative to k_s.

    A negative effect fails the ``psd`` condition instead of raising.
    """
    d, ops = _check_ops(ops, require_psd=False)
    k_s, k_a = _trace_constants(d, ops)
    k_p, k_m = (k_s + k_a) / 2, (k_s - k_a) / 2
    scale = max(abs(k_s), 1e-300)
    can = canonical_operators(d)
    eye2 = np.eye(d * d, dtype=complex)
    report = DesignReport(d=d, n=len(ops), k_s=k_s, k_a=k_a)
    worst_neg = max(-min_eigenvalue(a) for a in ops)
    report.residuals["psd"] = max(worst_neg, 0.0)
    report.passed["psd"] = worst_neg <= TOL_PSD

    second = sum(np.kron(a, a) for a in ops)
    report.residuals["ii"] = float(np.linalg.norm(second - k_s * can.sym - k_a * can.asym)) / scale

    rng = make_rng(seed)
    worst = 0.0
    for _ in range(HAAR_SAMPLES):
        u = haar_unitary(d, rng)
        uu = np.kron(u, u)
        worst = max(worst, float(np.linalg.norm(uu @ second - second @ uu)))
    report.residuals["i"] = worst / scale

    third = sum(np.kron(a, a.conj()) for a in ops)
    kp3, km3, r3 = _fit_two(third, eye2, d * can.phi_plus_projector)
    report.k_plus_iii, report.k_minus_iii = kp3, km3
    report.residuals["iii"] = float(np.linalg.norm(r3)) / scale

    one = vec(np.eye(d))
    fifth = sum(np.outer(vec(a), vec(a).conj()) for a in ops)
    kp5, km5, r5 = _fit_two(fifth, np.outer(one, one), eye2)
    report.k_plus_v, report.k_minus_v = kp5, km5
    report.residuals["v"] = float(np.linalg.norm(r5)) / scale

    transpose = superoperator_matrix(lambda x: x.T, d)
    fourth = sum(np.outer(vec(a), vec(a.conj()).conj()) for a in ops)
    report.residuals["iv"] = (
        float(np.linalg.norm(fourth - k_p * np.outer(one, one) - k_m * transpose)) / scale
    )

    const_gap = max(abs(kp3 - k_p), abs(km3 - k_m), abs(kp5 - k_p), abs(km5 - k_m)) / scale
    report.residuals["constants"] = const_gap
    for key in ("i", "ii", "iii", "iv", "v", "constants"):
        report.passed[key] = report.residuals[key] <= tol
    report.spanning = k_m > TOL_SPAN * max(k_p, 1e-300) and k_a >= -tol * scale
    return report


def build_sim(d: int, kappa: float, seed: int = 0) -> ConicalDesign:
    if not 0 < kappa <= 1:
        raise ValueError(f"SIM contraction parameter must lie in (0, 1], got {kappa}")
    blochs = vectors_from_gram(simplex_gram(d * d, kappa), d, make_rng(seed))
    eye = np.eye(d, dtype=complex)
    effects = [(eye + b.op) / (d * d) for b in blochs]
    for e in effects:
        if min_eigenvalue(e) < -TOL_PSD:
            raise ValueError(f"SIM with kappa={kappa} is not PSD in d={d}; use kappa <= {1 / (d - 1):.6g}")
    return design_from_ops(effects)


def build_mum(d: int, eta: float, seed: int = 0) -> ConicalDesign:
    """d+1 bands of d effects; band b is a (d, eta)-simplex orthogonal to every other band."""
    if not 0 < eta <= 1:
        raise ValueError(f"MUM contraction parameter must lie in (0, 1], got {eta}")
    gram = sla.block_diag(*[simplex_gram(d, eta)] * (d + 1))
    blochs = vectors_from_gram(gram, d, make_rng(seed))
    eye = np.eye(d, dtype=complex)
    effects = [(eye + b.op) / (d * (d + 1)) for b in blochs]
    for e in effects:
        if min_eigenvalue(e) < -TOL_PSD:
            raise ValueError(f"MUM with eta={eta} is not PSD in d={d}; use eta <= {1 / (d - 1):.6g}")
    return design_from_ops(effects)


def _weyl_heisenberg_orbit(fiducial: np.ndarray) -> list[np.ndarray]:
    d = fiducial.size
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    out = []
    for j in range(d):
        for k in range(d):
            v = np.linalg.matrix_power(shift, j) @ np.linalg.matrix_power(clock, k) @ fiducial
            out.append(np.outer(v, v.conj()))
    return out


def build_sic(d: int) -> list[np.ndarray]:
    """Unit-rank SIC projectors for d in {2, 3}."""
    if d == 2:
        dirs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
        return [(np.eye(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z) / 2 for x, y, z in dirs]
    if d == 3:
        return _weyl_heisenberg_orbit(np.array([0, 1, -1], dtype=complex) / np.sqrt(2))
    raise ValueError(f"SIC projectors are built in only for d in (2, 3), got {d}")


def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % p for p in range(2, int(d**0.5) + 1))


def build_mub(d: int) -> list[np.ndarray]:
    """Projectors of d+1 mutually unbiased bases for prime d <= 7."""
    if not _is_prime(d) or d > 7:
        raise ValueError(f"MUB projectors need a prime d <= 7, got {d}")
    bases = [np.eye(d, dtype=complex)]
    if d == 2:
        bases.append(np.array([[1, 1], [1, -1]], dtype=complex).T / np.sqrt(2))
        bases.append(np.array([[1, 1j], [1, -1j]], dtype=complex).T / np.sqrt(2))
    else:
        omega = np.exp(2j * np.pi / d)
        j = np.arange(d)
        for a in range(d):
            cols = [omega ** ((a * j * j + b * j) % d) / np.sqrt(d) for b in range(d)]
            bases.append(np.array(cols).T)
    return [np.outer(basis[:, c], basis[:, c].conj()) for basis in bases for c in range(d)]


@dataclass(frozen=True)
class RenesResult:
    ok: bool
    value: float
    target: float

    @property
    def residual(self) -> float:
        return abs(self.value - self.target)


def _check_unit_rank(projectors) -> tuple[int, list[np.ndarray]]:
    ps = [as_hermitian(p, "projector") for p in projectors]
    d = ps[0].shape[0]
    for p in ps:
        if abs(np.trace(p).real - 1.0) > TOL_DESIGN or np.max(np.abs(p @ p - p)) > TOL_DESIGN:
            raise ValueError("projective design input must be unit-rank projectors")
    return d, ps


def is_projective_2design(projectors, tol: float = TOL_DESIGN) -> RenesResult:
    d, ps = _check_unit_rank(projectors)
    n = len(ps)
    target = 2 * n * n / (d * (d + 1))
    gram = np.array([[np.trace(a @ b).real for b in ps] for a in ps])
    value = float(np.sum(gram**2))
    return RenesResult(n >= d * d and abs(value - target) <= tol * max(target, 1.0), value, target)


def design_povm(design: ConicalDesign) -> Povm:
    factor = design.d / (design.n * design.t**2)
    return Povm(design.d, tuple(a * factor * tj for a, tj in zip(design.ops, design.traces)))


def expand_operator(L: np.ndarray, design: ConicalDesign, tol: float = TOL_DESIGN) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients c with L = sum c_j A_j, and the reconstruction."""
    L = as_hermitian(L, "L")
    if L.shape != (design.d, design.d):
        raise ValueError(f"operator is {L.shape}, design lives in d={design.d}")
    k_p, k_m, d = design.k_plus, design.k_minus, design.d
    tr_l = float(np.trace(L).real)
    coeffs = np.array(
        [
            (np.trace(a @ L).real - k_p * tj * tr_l / (d * k_p + k_m)) / k_m
            for a, tj in zip(design.ops, design.traces)
        ]
    )
    recon = sum(c * a for c, a in zip(coeffs, design.ops))
    residual = float(np.linalg.norm(L - recon))
    if residual > tol * max(1.0, float(np.linalg.norm(L))):
        raise ReconstructionError(f"expansion residual {residual:.3e} exceeds tolerance")
    return coeffs, recon


def projector_probabilities(rho: np.ndarray, projectors) -> np.ndarray:
    d = rho.shape[0]
    n = len(projectors)
    return np.array([d * np.trace(rho @ p).real / n for p in projectors])


def reconstruct_state(probs, projectors) -> np.ndarray:
    n = len(projectors)
    d = projectors[0].shape[0]
    return sum(((d + 1) * p - d / n) * pi for p, pi in zip(probs, projectors))


def probability_radius(rho: np.ndarray, projectors) -> tuple[float, float]:
    """(sum p^2, d(1 + Tr rho^2)/(n(d+1)))."""
    p = projector_probabilities(rho, projectors)
    d, n = rho.shape[0], len(projectors)
    return float(np.sum(p**2)), d * (1 + np.trace(rho @ rho).real) / (n * (d + 1))


@dataclass(frozen=True)
class PurityVerdict:
    pure: bool
    quad: float
    quad_target: float
    cube: float
    cube_target: float

    @property
    def residuals(self) -> tuple[float, float]:
        return abs(self.quad - self.quad_target), abs(self.cube - self.cube_target)


def purity_from_probs(probs, projectors, tol: float = TOL_DESIGN) -> PurityVerdict:
    p = np.asarray(probs, dtype=float)
    n = len(projectors)
    d = projectors[0].shape[0]
    mix = sum(pa * pi for pa, pi in zip(p, projectors))
    quad = float(np.sum(p**2))
    cube = float(np.trace(mix @ mix @ mix).real)
    qt, ct = 2 * d / (n * (d + 1)), (d + 7) / (d + 1) ** 3
    return PurityVerdict(abs(quad - qt) <= tol and abs(cube - ct) <= tol, quad, qt, cube, ct)


def _hs_gram(vectors: list[BlochVector]) -> np.ndarray:
    n = len(vectors)
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = float(np.trace(vectors[i].op @ vectors[j].op).real)
    return g


def _require_homogeneous(design: ConicalDesign, tol: float) -> None:
    if max(design.traces) - min(design.traces) > tol * design.t:
        raise ValueError("design is not homogeneous: traces differ")
    if max(design.kappas) - min(design.kappas) > tol * max(design.kappa, 1.0):
        raise ValueError("design is not homogeneous: Bloch norms differ")


def homogeneous_gram(design: ConicalDesign, tol: float = TOL_DESIGN) -> tuple[CandidateProjector, float]:
    _require_homogeneous(design, tol)
    d, n = design.d, design.n
    gram = _hs_gram(design.bloch_vectors())
    lam = float(np.trace(gram)) / (d * d - 1)
    proj = CandidateProjector(n, d, gram / lam)
    proj.validate(max(tol, 1e-8))
    kappa = float(np.sqrt(lam * (d + 1) / (n * d)))
    if abs(kappa - design.kappa) > max(tol, 1e-8):
        raise ValueError(f"kappa from Gram {kappa:.12g} disagrees with design kappa {design.kappa:.12g}")
    return proj, lam


def simplex_projector(n: int, d: int) -> CandidateProjector:
    if n != d * d:
        raise ValueError(f"a regular-simplex projector needs n = d^2 = {d * d}, got {n}")
    return CandidateProjector(n, d, np.eye(n) - np.ones((n, n)) / n)


def mum_projector(d: int) -> CandidateProjector:
    block = np.eye(d) - np.ones((d, d)) / d
    return CandidateProjector(d * (d + 1), d, sla.block_diag(*[block] * (d + 1)))


def build_from_projector(
    proj: CandidateProjector, t: float, seed: int = 0, kappa: float | None = None
) -> ConicalDesign:
    """Homogeneous design on the inball (kappa = 1/(d-1) unless a smaller kappa is requested)."""
    proj.validate()
    n, d = proj.n, proj.d
    w, v = sla.eigh(np.asarray(proj.P, dtype=float))
    u = v[:, w > 0.5]
    if u.shape[1] != d * d - 1:
        raise ValueError(f"projector rank {u.shape[1]} != d^2 - 1")
    basis = traceless_basis(d, make_rng(seed))
    factor = np.sqrt(n * d / ((d + 1) * (d - 1) ** 2))
    if kappa is not None:
        factor *= kappa * (d - 1)
    eye = np.eye(d, dtype=complex)
    ops = []
    for j in range(n):
        b = factor * sum(u[j, a] * basis[a] for a in range(d * d - 1))
        a_j = (eye + b) * t / d
        if min_eigenvalue(a_j) < -TOL_PSD:
            raise ValueError("requested kappa leaves the Bloch body")
        ops.append(a_j)
    return design_from_ops(ops)


def lift_check(design: ConicalDesign, tol: float = TOL_DESIGN) -> bool:
    try:
        _require_homogeneous(design, tol)
    except ValueError:
        return False
    d = design.d
    blochs = design.bloch_vectors()
    if np.linalg.norm(sum(b.op for b in blochs)) > tol * design.n:
        return False
    frame = sum(np.outer(vec(b.op), vec(b.op).conj()) for b in blochs)
    one = vec(np.eye(d))
    pi_b = np.eye(d * d) - np.outer(one, one) / d
    lam = float(np.trace(frame).real) / (d * d - 1)
    return float(np.linalg.norm(frame - lam * pi_b)) <= tol * max(lam, 1.0)


def minimal_povm_is_sim(povm: Povm, tol: float = TOL_DESIGN) -> tuple[bool, float | None]:
    """True (with kappa) when a d^2-outcome POVM is a conical 2-design, hence a SIM."""
    d = povm.d
    if len(povm.effects) != d * d:
        raise ValueError(f"minimal POVM needs exactly d^2 = {d * d} effects, got {len(povm.effects)}")
    report = verify_design(povm.effects, tol)
    if not report.ok:
        return False, None
    design = design_from_ops(povm.effects)
    kappa = design.kappa
    for i, a in enumerate(povm.effects):
        for j, b in enumerate(povm.effects):
            expected = (d * d * kappa**2 * (i == j) + d + 1 - kappa**2) / (d**3 * (d + 1))
            if abs(np.trace(a @ b).real - expected) > tol:
                return False, None
    return True, kappa


def conjugate_design(design: ConicalDesign, u: np.ndarray) -> ConicalDesign:
    return design_from_ops([u @ a @ u.conj().T for a in design.ops])


def merge_designs(a: ConicalDesign, b: ConicalDesign) -> ConicalDesign:
    if a.d != b.d:
        raise ValueError(f"cannot merge designs in d={a.d} and d={b.d}")
    return design_from_ops(list(a.ops) + list(b.ops))


def perturbed_povm(design: ConicalDesign, size: float, seed: int = 0) -> Povm:
    """Random Hermitian kick of each effect, renormalized so the set stays a POVM."""
    rng = make_rng(seed)
    d = design.d
    kicked = []
    for a in design.ops:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        kicked.append(a + size * (g @ g.conj().T) / d)
    s_inv = np.linalg.inv(hermitian_sqrt(sum(kicked)))
    return Povm(d, tuple(s_inv @ e @ s_inv for e in kicked))


def design_to_json(design: ConicalDesign) -> dict:
    return {
        "d": design.d,
        "ops": [matrix_to_json(a) for a in design.ops],
        "constants": {"ks": design.k_s, "ka": design.k_a, "kappa": design.kappa, "t": design.t},
    }


def design_from_json(obj: dict) -> ConicalDesign:
    try:
        d = int(obj["d"])
        ops = [matrix_from_json(m) for m in obj["ops"]]
    except (KeyError, TypeError) as exc:
        raise ValueError("design JSON needs d and ops") from exc
    for a in ops:
        if a.shape != (d, d):
            raise ValueError(f"design JSON declares d={d} but holds a {a.shape} operator")
    return design_from_ops(ops)
