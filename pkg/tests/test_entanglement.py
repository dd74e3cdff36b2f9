import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.designs import build_mub, build_mum, build_sic, build_sim, design_from_ops  # noqa: E402
from qjw.entanglement import (  # noqa: E402
    concurrence_from_design,
    concurrence_pure,
    concurrence_table,
    isotropic_state,
    max_concurrence,
    pnorm_prediction,
    product_povm_probs,
    random_product_ket,
    random_separable_state,
    reduced_states,
    schmidt,
    werner_from_design,
    werner_state,
    werner_to_isotropic_fidelity,
    witness_tests,
    witnesses_from_design,
)
from qjw.linalg import canonical_operators, haar_unitary, make_rng, partial_transpose, random_pure_ket  # noqa: E402


def design_kinds(d: int):
    yield "sic", design_from_ops([p / d for p in build_sic(d)])
    yield "mub", design_from_ops([p / (d + 1) for p in build_mub(d)])
    yield "sim", build_sim(d, 1 / (d - 1))
    yield "mum", build_mum(d, 1 / (d - 1))


class TestPureStates(unittest.TestCase):
    def test_schmidt_reconstructs(self) -> None:
        psi = random_pure_ket(9, make_rng(0))
        dec = schmidt(psi)
        self.assertAlmostEqual(float(np.sum(dec.coefficients**2)), 1.0)
        np.testing.assert_allclose(dec.reconstruct(), psi, atol=1e-12)

    def test_concurrence_extremes(self) -> None:
        rng = make_rng(1)
        for d in (2, 3, 4):
            self.assertAlmostEqual(concurrence_pure(random_product_ket(d, rng)), 0.0, delta=1e-7)
            phi = canonical_operators(d).phi_plus
            self.assertAlmostEqual(concurrence_pure(phi), max_concurrence(d))

    def test_rejects_unnormalized(self) -> None:
        with self.assertRaises(ValueError):
            concurrence_pure(np.ones(4))
        with self.assertRaises(ValueError):
            schmidt(np.ones(3) / np.sqrt(3))

    def test_pnorm_prediction(self) -> None:
        rng = make_rng(2)
        for d in (2, 3):
            for kind, design in design_kinds(d):
                for _ in range(10):
                    psi = random_pure_ket(d * d, rng)
                    measured = float(np.sum(product_povm_probs(psi, design.ops) ** 2))
                    predicted = pnorm_prediction(schmidt(psi).coefficients, design.k_s, design.k_a)
                    self.assertAlmostEqual(measured, predicted, delta=1e-12, msg=kind)

    def test_concurrence_from_design_matches_schmidt(self) -> None:
        rng = make_rng(3)
        for d in (2, 3):
            for kind, design in design_kinds(d):
                rows = concurrence_table(design.ops, design.k_s, design.k_a, 500, rng)
                self.assertEqual(len(rows), 500)
                self.assertLess(max(r["delta"] for r in rows), 1e-8, kind)

    def test_pnorm_is_local_unitary_invariant(self) -> None:
        rng = make_rng(7)
        for d in (2, 3):
            for kind, design in design_kinds(d):
                for _ in range(20):
                    psi = random_pure_ket(d * d, rng)
                    local = np.kron(haar_unitary(d, rng), haar_unitary(d, rng)) @ psi
                    before = np.linalg.norm(product_povm_probs(psi, design.ops))
                    after = np.linalg.norm(product_povm_probs(local, design.ops))
                    self.assertAlmostEqual(before, after, delta=1e-12, msg=kind)

    def test_pnorm_of_basis_measurement_is_not_invariant(self) -> None:
        basis = [np.diag(e).astype(complex) for e in np.eye(2)]
        hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        psi = np.kron([1, 0], [1, 0]).astype(complex)
        local = np.kron(hadamard, np.eye(2)) @ psi
        self.assertAlmostEqual(float(np.sum(product_povm_probs(psi, basis) ** 2)), 1.0, delta=1e-12)
        self.assertAlmostEqual(float(np.sum(product_povm_probs(local, basis) ** 2)), 0.5, delta=1e-12)

    def test_concurrence_needs_ks_above_ka(self) -> None:
        with self.assertRaises(ValueError):
            concurrence_from_design(0.1, 0.2, 0.2)

    def test_table_carries_witness_verdicts(self) -> None:
        design = design_from_ops([p / 2 for p in build_sic(2)])
        rows = concurrence_table(
            design.ops, design.k_s, design.k_a, 5, make_rng(4), witnesses_from_design(design)
        )
        self.assertIn("lin_below", rows[0])
        self.assertIn("tr_N_PT", rows[0])


class TestWitnesses(unittest.TestCase):
    def test_separable_states_fire_no_witness(self) -> None:
        rng = make_rng(5)
        for d in (2, 3):
            for kind, design in design_kinds(d):
                wit = witnesses_from_design(design)
                for _ in range(500):
                    rho = random_separable_state(d, rng)
                    v = witness_tests(rho, wit)
                    self.assertGreaterEqual(v.tr_n, wit.s_minus - 1e-10)
                    self.assertLessEqual(v.tr_n_pt, wit.s_plus + 1e-10)
                    self.assertFalse(any([v.lin_above, v.lin_below, v.quad_above, v.quad_below]), kind)

    def test_product_states_sit_above_k_plus(self) -> None:
        rng = make_rng(8)
        for d in (2, 3):
            for kind, design in design_kinds(d):
                wit = witnesses_from_design(design)
                for _ in range(200):
                    v = random_product_ket(d, rng)
                    tr_n = float(np.vdot(v, wit.N @ v).real)
                    self.assertGreaterEqual(tr_n, design.k_plus - 1e-12, kind)

    def test_werner_singlet_margin(self) -> None:
        design = design_from_ops([p / 2 for p in build_sic(2)])
        wit = witnesses_from_design(design)
        v = witness_tests(werner_state(2, 1.0), wit)
        self.assertTrue(v.lin_below)
        self.assertAlmostEqual(wit.s_minus - v.tr_n, wit.k_minus * (2 * 1.0 - 1), delta=1e-12)
        self.assertAlmostEqual(wit.s_minus - v.tr_n, 1 / 6, delta=1e-12)

    def test_werner_detected_above_half(self) -> None:
        design = design_from_ops([p / 2 for p in build_sic(2)])
        for p in (0.55, 0.8, 1.0):
            self.assertTrue(witness_tests(werner_state(2, p), design).lin_below)
        for p in (0.0, 0.3, 0.5):
            self.assertFalse(witness_tests(werner_state(2, p), design).lin_below)

    def test_linear_fires_before_quadratic_in_qutrits(self) -> None:
        design = design_from_ops([p / 3 for p in build_sic(3)])
        v = witness_tests(werner_state(3, 0.6), design)
        self.assertTrue(v.lin_below)
        self.assertFalse(v.quad_below)
        self.assertTrue(witness_tests(werner_state(3, 0.9), design).quad_below)

    def test_maximally_mixed_fires_nothing(self) -> None:
        design = design_from_ops([p / 3 for p in build_sic(3)])
        v = witness_tests(np.eye(9) / 9, design)
        self.assertFalse(any([v.lin_above, v.lin_below, v.quad_above, v.quad_below]))

    def test_isotropic_detected_by_partial_transpose_witness(self) -> None:
        design = design_from_ops([p / 2 for p in build_sic(2)])
        self.assertTrue(witness_tests(isotropic_state(2, 1.0), design).lin_above)
        self.assertFalse(witness_tests(isotropic_state(2, 0.5), design).lin_above)

    def test_dimension_mismatch(self) -> None:
        design = design_from_ops([p / 2 for p in build_sic(2)])
        with self.assertRaises(ValueError):
            witness_tests(np.eye(9) / 9, design)


class TestInvariantStates(unittest.TestCase):
    def test_werner_and_isotropic_are_states(self) -> None:
        for d in (2, 3):
            for p in (0.0, 0.4, 1.0):
                for rho in (werner_state(d, p), isotropic_state(d, p)):
                    self.assertAlmostEqual(np.trace(rho).real, 1.0)
                    self.assertGreaterEqual(np.linalg.eigvalsh(rho)[0], -1e-12)
        with self.assertRaises(ValueError):
            werner_state(2, 1.5)

    def test_werner_and_isotropic_covariance(self) -> None:
        rng = make_rng(9)
        for d in (2, 3):
            werner, iso = werner_state(d, 0.7), isotropic_state(d, 0.6)
            for _ in range(20):
                u = haar_unitary(d, rng)
                uu = np.kron(u, u)
                uubar = np.kron(u, u.conj())
                np.testing.assert_allclose(uu @ werner @ uu.conj().T, werner, atol=1e-12)
                np.testing.assert_allclose(uubar @ iso @ uubar.conj().T, iso, atol=1e-12)

    def test_reduced_states_maximally_mixed(self) -> None:
        r1, r2 = reduced_states(werner_state(3, 0.7))
        np.testing.assert_allclose(r1, np.eye(3) / 3, atol=1e-12)
        np.testing.assert_allclose(r2, np.eye(3) / 3, atol=1e-12)

    def test_partial_transpose_bridge(self) -> None:
        for d in (2, 3):
            for p in (0.0, 0.25, 0.5):
                pt = partial_transpose(werner_state(d, p))
                np.testing.assert_allclose(pt, isotropic_state(d, werner_to_isotropic_fidelity(d, p)), atol=1e-12)
        with self.assertRaises(ValueError):
            werner_to_isotropic_fidelity(2, 0.8)

    def test_sim_second_moment_is_decomposable_werner(self) -> None:
        for d in (2, 3, 4):
            fit = werner_from_design(build_sim(d, 1 / (d - 1)))
            self.assertLess(fit.residual, 1e-10)
            self.assertLessEqual(fit.p, (d - 1) / (2 * d) + 1e-12)
            self.assertTrue(fit.decomposable)
        self.assertAlmostEqual(werner_from_design(build_sim(2, 1.0)).p, 0.0, delta=1e-12)

    def test_random_separable_state(self) -> None:
        rho = random_separable_state(3, make_rng(6))
        self.assertAlmostEqual(np.trace(rho).real, 1.0)
        self.assertGreaterEqual(np.linalg.eigvalsh(rho)[0], -1e-12)


if __name__ == "__main__":
    unittest.main()
