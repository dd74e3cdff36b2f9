import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.config import ReconstructionError  # noqa: E402
from qjw.designs import (  # noqa: E402
    build_from_projector,
    build_mub,
    build_mum,
    build_sic,
    build_sim,
    conjugate_design,
    design_constants,
    design_from_json,
    design_from_ops,
    design_povm,
    design_to_json,
    expand_operator,
    homogeneous_gram,
    is_projective_2design,
    lift_check,
    merge_designs,
    minimal_povm_is_sim,
    mum_projector,
    perturbed_povm,
    probability_radius,
    projector_probabilities,
    purity_from_probs,
    reconstruct_state,
    simplex_projector,
    verify_design,
)
from qjw.linalg import haar_unitary, make_rng, random_density_matrix, random_hermitian, random_pure_ket  # noqa: E402


def sim_constants(d: int, kappa: float) -> tuple[float, float]:
    k_s = (d + 1 + (d - 1) * kappa**2) / (d * d * (d + 1))
    k_a = (1 - kappa**2) / (d * d)
    return k_s, k_a


class TestDesignVerification(unittest.TestCase):
    def test_sim_and_mum_pass_every_condition(self) -> None:
        for d in (2, 3, 4, 5):
            for design in (build_sim(d, 1 / (d - 1)), build_mum(d, 1 / (d - 1))):
                report = verify_design(design.ops)
                self.assertTrue(report.ok, f"d={d}: {report.residuals}")
                self.assertTrue(all(v < 1e-9 for v in report.residuals.values()))

    def test_sim_constants_match_closed_form(self) -> None:
        for d, kappa in ((2, 1.0), (3, 0.5), (3, 0.2), (4, 1 / 3)):
            design = build_sim(d, kappa, seed=1)
            k_s, k_a = sim_constants(d, kappa)
            self.assertAlmostEqual(design.k_s, k_s, delta=1e-10)
            self.assertAlmostEqual(design.k_a, k_a, delta=1e-10)
            self.assertAlmostEqual(design.kappa, kappa, delta=1e-10)

    def test_mum_constants(self) -> None:
        d, eta = 3, 0.5
        design = build_mum(d, eta)
        self.assertEqual(design.n, d * (d + 1))
        n = d * (d + 1)
        # every effect has trace 1/(d+1) and Bloch norm eta
        s1 = n / (d + 1) ** 2
        s2 = n * (d + d * (d - 1) * eta**2) / (d * (d + 1)) ** 2
        self.assertAlmostEqual(design.k_s, (s1 + s2) / (d * (d + 1)), delta=1e-12)
        self.assertAlmostEqual(design.k_a, (s1 - s2) / (d * (d - 1)), delta=1e-12)

    def test_conditions_agree_on_constants(self) -> None:
        design = build_sim(3, 0.4, seed=2)
        report = verify_design(design.ops)
        self.assertAlmostEqual(report.k_plus_iii, design.k_plus, delta=1e-10)
        self.assertAlmostEqual(report.k_minus_v, design.k_minus, delta=1e-10)

    def test_perturbed_set_fails(self) -> None:
        design = build_sim(3, 0.5)
        ops = list(design.ops)
        ops[0] = ops[0] * 1.1
        report = verify_design(ops)
        self.assertFalse(report.ok)
        self.assertGreater(report.residuals["ii"], 1e-6)

    def test_perturbed_povm_is_not_a_design(self) -> None:
        povm = perturbed_povm(build_sim(2, 1.0), 0.2, seed=4)
        np.testing.assert_allclose(sum(povm.effects), np.eye(2), atol=1e-9)
        self.assertFalse(verify_design(povm.effects).ok)

    def test_single_basis_is_not_spanning(self) -> None:
        ops = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
        self.assertFalse(verify_design(ops).ok)

    def test_rejects_non_psd(self) -> None:
        with self.assertRaises(ValueError):
            design_constants([np.diag([1.0, -1.0])])

    def test_negative_effect_is_a_failed_condition(self) -> None:
        ops = list(build_sim(2, 1.0).ops)
        ops[0] = ops[0] - 0.1 * np.eye(2)
        report = verify_design(ops)
        self.assertFalse(report.ok)
        self.assertFalse(report.passed["psd"])
        self.assertAlmostEqual(report.residuals["psd"], 0.1, delta=1e-9)
        self.assertEqual(set(report.residuals), {"psd", "i", "ii", "iii", "iv", "v", "constants"})

    def test_unitary_conjugation_and_merge(self) -> None:
        design = build_sim(3, 0.5)
        u = haar_unitary(3, make_rng(8))
        rotated = conjugate_design(design, u)
        self.assertTrue(verify_design(rotated.ops).ok)
        self.assertAlmostEqual(rotated.k_s, design.k_s, delta=1e-12)
        merged = merge_designs(design, build_mum(3, 0.25))
        self.assertTrue(verify_design(merged.ops).ok)
        with self.assertRaises(ValueError):
            merge_designs(design, build_sim(2, 1.0))

    def test_minimal_povm_is_sim(self) -> None:
        design = build_sim(3, 0.5)
        ok, kappa = minimal_povm_is_sim(design_povm(design))
        self.assertTrue(ok)
        self.assertAlmostEqual(kappa, 0.5, delta=1e-9)

    def test_json_round_trip_keeps_constants(self) -> None:
        design = build_mum(2, 0.8)
        obj = design_to_json(design)
        self.assertEqual(set(obj["constants"]), {"ks", "ka", "kappa", "t"})
        again = design_from_json(obj)
        self.assertAlmostEqual(again.k_s, design.k_s, delta=1e-14)
        with self.assertRaises(ValueError):
            design_from_json({"ops": []})


class TestProjectiveDesigns(unittest.TestCase):
    def test_sic_qubit_frame_potential(self) -> None:
        res = is_projective_2design(build_sic(2))
        self.assertTrue(res.ok)
        self.assertAlmostEqual(res.value, 16 / 3, delta=1e-10)

    def test_sic_qutrit(self) -> None:
        sic = build_sic(3)
        self.assertEqual(len(sic), 9)
        for i, a in enumerate(sic):
            for j, b in enumerate(sic):
                expected = 1.0 if i == j else 0.25
                self.assertAlmostEqual(np.trace(a @ b).real, expected, delta=1e-12)
        self.assertTrue(is_projective_2design(sic).ok)

    def test_mubs(self) -> None:
        for d in (2, 3, 5):
            mub = build_mub(d)
            self.assertEqual(len(mub), d * (d + 1))
            res = is_projective_2design(mub)
            self.assertTrue(res.ok)
            self.assertAlmostEqual(res.value, 2 * (d + 1) ** 2 * d / (d + 1), delta=1e-9)
        with self.assertRaises(ValueError):
            build_mub(4)

    def test_one_basis_is_not_a_design(self) -> None:
        self.assertFalse(is_projective_2design(build_mub(3)[:3]).ok)

    def test_state_reconstruction(self) -> None:
        rng = make_rng(12)
        for projectors in (build_sic(2), build_sic(3), build_mub(3)):
            d = projectors[0].shape[0]
            for _ in range(100):
                rho = random_density_matrix(d, rng)
                probs = projector_probabilities(rho, projectors)
                self.assertAlmostEqual(probs.sum(), 1.0, delta=1e-12)
                self.assertLess(np.linalg.norm(reconstruct_state(probs, projectors) - rho), 1e-10)

    def test_probability_radius(self) -> None:
        rng = make_rng(13)
        sic = build_sic(3)
        for _ in range(10):
            value, predicted = probability_radius(random_density_matrix(3, rng), sic)
            self.assertAlmostEqual(value, predicted, delta=1e-12)

    def test_purity_from_probabilities(self) -> None:
        rng = make_rng(14)
        for projectors in (build_sic(2), build_mub(3)):
            d = projectors[0].shape[0]
            for _ in range(50):
                v = random_pure_ket(d, rng)
                pure = np.outer(v, v.conj())
                verdict = purity_from_probs(projector_probabilities(pure, projectors), projectors)
                self.assertTrue(verdict.pure)
                self.assertLess(max(verdict.residuals), 1e-9)
                mixed = random_density_matrix(d, rng)
                verdict = purity_from_probs(projector_probabilities(mixed, projectors), projectors)
                self.assertFalse(verdict.pure)


class TestExpansion(unittest.TestCase):
    def test_expand_operator(self) -> None:
        design = build_sim(3, 0.5)
        L = random_hermitian(3, make_rng(6))
        coeffs, recon = expand_operator(L, design)
        self.assertEqual(len(coeffs), 9)
        np.testing.assert_allclose(recon, L, atol=1e-10)

    def test_expand_fails_without_spanning(self) -> None:
        design = design_from_ops([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        with self.assertRaises(ReconstructionError):
            expand_operator(np.array([[0, 1], [1, 0]]), design)


class TestHomogeneous(unittest.TestCase):
    def test_round_trip_simplex_and_mum(self) -> None:
        for d in (2, 3):
            for proj in (simplex_projector(d * d, d), mum_projector(d)):
                design = build_from_projector(proj, t=1.0 / d, seed=d)
                self.assertTrue(verify_design(design.ops).ok)
                back, _ = homogeneous_gram(design)
                np.testing.assert_allclose(back.P, proj.P, atol=1e-9)
                self.assertTrue(lift_check(design))

    def test_smaller_kappa(self) -> None:
        design = build_from_projector(simplex_projector(9, 3), t=1 / 3, kappa=0.3)
        self.assertAlmostEqual(design.kappa, 0.3, delta=1e-10)

    def test_simplex_projector_needs_square_size(self) -> None:
        with self.assertRaises(ValueError):
            simplex_projector(8, 3)

    def test_non_homogeneous_rejected(self) -> None:
        merged = merge_designs(build_sim(2, 1.0), build_sim(2, 0.5))
        with self.assertRaises(ValueError):
            homogeneous_gram(merged)
        self.assertFalse(lift_check(merged))


if __name__ == "__main__":
    unittest.main()
