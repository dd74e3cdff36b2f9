"""Pure-state entanglement through design probabilities, witnesses and invariant states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qjw.config import TOL_DESIGN, TOL_PSD
from qjw.designs import ConicalDesign
from qjw.linalg import (
    SeededRng,
    as_hermitian,
    canonical_operators,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    random_pure_ket,
)


@dataclass(frozen=True)
class SchmidtDecomposition:
    d: int
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return sum(
            c * np.kron(self.left[:, j], self.right[:, j]) for j, c in enumerate(self.coefficients)
        )


@dataclass(frozen=True)
class WitnessPair:
    d: int
    N: np.ndarray
    N_pt: np.ndarray
    k_plus: float
    k_minus: float

    @property
    def s_minus(self) -> float:
        return self.k_plus

    @property
    def s_plus(self) -> float:
        return self.k_plus + self.k_minus

    @property
    def e_minus(self) -> float:
        return self.k_plus - self.k_minus

    @property
    def e_plus_pt(self) -> float:
        return self.k_plus + self.d * self.k_minus


@dataclass(frozen=True)
class WitnessVerdicts:
    lin_above: bool
    lin_below: bool
    quad_above: bool
    quad_below: bool
    tr_n: float
    tr_n_pt: float

    def as_dict(self) -> dict:
        return {
            "lin_above": self.lin_above,
            "lin_below": self.lin_below,
            "quad_above": self.quad_above,
            "quad_below": self.quad_below,
            "tr_N": self.tr_n,
            "tr_N_PT": self.tr_n_pt,
        }


@dataclass(frozen=True)
class WernerFit:
    p: float
    residual: float
    decomposable: bool


def _square_dim(psi: np.ndarray) -> int:
    d = int(round(np.sqrt(psi.size)))
    if d * d != psi.size:
        raise ValueError(f"ket length {psi.size} is not d*d")
    return d


def _unit_ket(psi: np.ndarray, tol: float = TOL_DESIGN) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"ket must have unit norm, got {nrm:.12g}")
    return psi


def schmidt(psi: np.ndarray) -> SchmidtDecomposition:
    psi = _unit_ket(psi)
    d = _square_dim(psi)
    u, s, vh = np.linalg.svd(psi.reshape(d, d))
    return SchmidtDecomposition(d, s, u, vh.T)


def concurrence_pure(psi: np.ndarray) -> float:
    psi = _unit_ket(psi)
    d = _square_dim(psi)
    red = partial_trace(np.outer(psi, psi.conj()), 2, (d, d))
    return float(np.sqrt(max(2.0 - 2.0 * np.trace(red @ red).real, 0.0)))


def product_povm_probs(psi: np.ndarray, effects: Sequence[np.ndarray]) -> np.ndarray:
    """p[a, b] = <psi| E_a (x) E_b |psi>."""
    psi = _unit_ket(psi)
    d = _square_dim(psi)
    m = psi.reshape(d, d)
    stack = np.asarray(effects, dtype=complex)
    x = np.einsum("ij,aik,kl->ajl", m.conj(), stack, m)
    return np.einsum("ajl,bjl->ab", x, stack).real


def pnorm_prediction(coefficients: np.ndarray, k_s: float, k_a: float) -> float:
    """||p||^2 predicted from Schmidt coefficients."""
    l4 = float(np.sum(np.asarray(coefficients) ** 4))
    return 0.5 * (k_s**2 + k_a**2) + 0.5 * (k_s**2 - k_a**2) * l4


def concurrence_from_design(pnorm: float, k_s: float, k_a: float) -> float:
    if not k_s > k_a:
        raise ValueError(f"concurrence from design needs k_s > k_a, got {k_s} <= {k_a}")
    ratio = (k_s**2 - pnorm**2) / (k_s**2 - k_a**2)
    return 2.0 * float(np.sqrt(max(ratio, 0.0)))


def max_concurrence(d: int) -> float:
    return float(np.sqrt(2.0 * (d - 1) / d))


def witnesses_from_design(design: ConicalDesign) -> WitnessPair:
    n_op = sum(np.kron(a, a) for a in design.ops)
    return WitnessPair(design.d, n_op, partial_transpose(n_op), design.k_plus, design.k_minus)


def reduced_states(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return partial_trace(rho, 2), partial_trace(rho, 1)


def witness_tests(rho: np.ndarray, wit: WitnessPair | ConicalDesign, tol: float = TOL_DESIGN) -> WitnessVerdicts:
    if isinstance(wit, ConicalDesign):
        wit = witnesses_from_design(wit)
    rho = as_hermitian(rho, "rho")
    if rho.shape != wit.N.shape:
        raise ValueError(f"state is {rho.shape}, witnesses act on {wit.N.shape}")
    r1, r2 = reduced_states(rho)
    prod = np.kron(r1, r2)
    tr_n = float(np.trace(rho @ wit.N).real)
    tr_pt = float(np.trace(rho @ wit.N_pt).real)
    bound = wit.k_minus * np.sqrt(
        max(1 - np.trace(r1 @ r1).real, 0.0) * max(1 - np.trace(r2 @ r2).real, 0.0)
    )
    dev_n = abs(tr_n - float(np.trace(prod @ wit.N).real))
    dev_pt = abs(tr_pt - float(np.trace(prod @ wit.N_pt).real))
    return WitnessVerdicts(
        lin_above=tr_pt > wit.s_plus + tol,
        lin_below=tr_n < wit.s_minus - tol,
        quad_above=dev_pt > bound + tol,
        quad_below=dev_n > bound + tol,
        tr_n=tr_n,
        tr_n_pt=tr_pt,
    )


def werner_state(d: int, p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {p}")
    can = canonical_operators(d)
    return 2 * (1 - p) / (d * (d + 1)) * can.sym + 2 * p / (d * (d - 1)) * can.asym


def isotropic_state(d: int, fidelity: float) -> np.ndarray:
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"isotropic fidelity must lie in [0, 1], got {fidelity}")
    phi = canonical_operators(d).phi_plus_projector
    rest = np.eye(d * d) - phi
    return fidelity * phi + (1 - fidelity) * rest / (d * d - 1)


def werner_to_isotropic_fidelity(d: int, p: float) -> float:
    """Fidelity of the partial transpose of werner_state(d, p); a state only for p <= 1/2."""
    if p > 0.5:
        raise ValueError(f"the partial transpose of an entangled Werner state (p={p}) is not a state")
    return (1 - 2 * p) / d


def werner_from_design(design: ConicalDesign) -> WernerFit:
    d = design.d
    second = sum(np.kron(a, a) for a in design.ops)
    total = float(np.trace(second).real)
    rho = second / total
    p = design.k_a * d * (d - 1) / 2 / total
    p = min(max(p, 0.0), 1.0)
    residual = float(np.linalg.norm(rho - werner_state(d, p)))
    if min_eigenvalue(rho) < -TOL_PSD:
        raise ValueError("normalized second moment is not a state")
    return WernerFit(p, residual, p <= (d - 1) / (2 * d) + TOL_DESIGN)


def random_product_ket(d: int, rng: SeededRng) -> np.ndarray:
    return np.kron(random_pure_ket(d, rng), random_pure_ket(d, rng))


def random_separable_state(d: int, rng: SeededRng, terms: int = 5) -> np.ndarray:
    count = int(rng.integers(1, terms + 1))
    weights = rng.dirichlet(np.ones(count))
    rho = np.zeros((d * d, d * d), dtype=complex)
    for w in weights:
        v = random_product_ket(d, rng)
        rho += w * np.outer(v, v.conj())
    return rho


def concurrence_table(
    effects: Sequence[np.ndarray],
    k_s: float,
    k_a: float,
    samples: int,
    rng: SeededRng,
    witnesses: WitnessPair | None = None,
) -> list[dict]:
    """One row per Haar-random pure state: ||p||, both concurrences and their gap.

    With ``witnesses`` each row also carries the four witness verdicts for the state.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    d = effects[0].shape[0]
    rows = []
    for i in range(samples):
        psi = random_pure_ket(d * d, rng)
        pnorm = float(np.linalg.norm(product_povm_probs(psi, effects)))
        c_schmidt = concurrence_pure(psi)
        c_design = concurrence_from_design(pnorm, k_s, k_a)
        rows.append(
            {
                "state": i,
                "pnorm": pnorm,
                "c_schmidt": c_schmidt,
                "c_design": c_design,
                "delta": abs(c_design - c_schmidt),
            }
        )
        if witnesses is not None:
            rows[-1].update(witness_tests(np.outer(psi, psi.conj()), witnesses).as_dict())
    return rows
