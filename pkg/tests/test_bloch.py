import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.bloch import (  # noqa: E402
    BlochGeometry,
    BlochVector,
    bloch_gram,
    bloch_inner,
    bloch_norm,
    bloch_projector_apply,
    bloch_to_state,
    in_bloch_body,
    purity_test,
    regular_simplex,
    simplex_gram,
    state_to_bloch,
    traceless_basis,
)
from qjw.linalg import make_rng, random_density_matrix, random_hermitian, random_pure_ket  # noqa: E402


class TestBlochMap(unittest.TestCase):
    def test_round_trip(self) -> None:
        rng = make_rng(0)
        for d in (2, 3, 4):
            for _ in range(200):
                rho = random_density_matrix(d, rng)
                b = state_to_bloch(rho)
                self.assertAlmostEqual(np.trace(b.op).real, 0.0)
                self.assertTrue(BlochGeometry(d).in_outball(b))
                np.testing.assert_allclose(bloch_to_state(b), rho, atol=1e-12)

    def test_pure_states_sit_on_outball(self) -> None:
        rng = make_rng(1)
        for d in (2, 3, 5):
            v = random_pure_ket(d, rng)
            b = state_to_bloch(np.outer(v, v.conj()))
            self.assertAlmostEqual(bloch_norm(b), 1.0)
            self.assertTrue(BlochGeometry(d).in_outball(b))

    def test_maximally_mixed_is_origin(self) -> None:
        b = state_to_bloch(np.eye(3) / 3)
        self.assertAlmostEqual(bloch_norm(b), 0.0)

    def test_inball_is_inside_body(self) -> None:
        rng = make_rng(2)
        for d in (2, 3, 4, 5):
            geom = BlochGeometry(d)
            for _ in range(500):
                h = bloch_projector_apply(random_hermitian(d, rng))
                b = BlochVector(d, h * geom.r_in / bloch_norm(BlochVector(d, h)))
                self.assertTrue(geom.in_inball(b))
                self.assertTrue(in_bloch_body(b), f"d={d}")

    def test_qubit_ball_is_the_body(self) -> None:
        rng = make_rng(6)
        geom = BlochGeometry(2)
        for _ in range(200):
            h = bloch_projector_apply(random_hermitian(2, rng))
            unit = h / bloch_norm(BlochVector(2, h))
            r = rng.uniform(0.0, 1.0)
            inside = BlochVector(2, r * unit)
            self.assertTrue(geom.in_outball(inside))
            self.assertTrue(in_bloch_body(inside))
            self.assertGreaterEqual(np.linalg.eigvalsh(bloch_to_state(inside)).min(), -1e-12)
            self.assertFalse(in_bloch_body(BlochVector(2, 1.01 * unit)))

    def test_outside_body_rejected(self) -> None:
        d = 3
        op = np.diag([-2.0, 1.0, 1.0]).astype(complex)
        b = BlochVector(d, op)
        self.assertFalse(in_bloch_body(b))
        with self.assertRaises(ValueError):
            bloch_to_state(b)

    def test_non_state_rejected(self) -> None:
        with self.assertRaises(ValueError):
            state_to_bloch(np.eye(2))
        with self.assertRaises(ValueError):
            state_to_bloch(np.diag([1.5, -0.5]))

    def test_inner_matches_hilbert_schmidt(self) -> None:
        rng = make_rng(4)
        d = 3
        r1, r2 = random_density_matrix(d, rng), random_density_matrix(d, rng)
        b1, b2 = state_to_bloch(r1), state_to_bloch(r2)
        expected = (d * np.trace(r1 @ r2).real - 1) / (d - 1)
        self.assertAlmostEqual(bloch_inner(b1, b2), expected)


class TestSimplex(unittest.TestCase):
    def test_traceless_basis_orthonormal(self) -> None:
        basis = traceless_basis(3, make_rng(9))
        self.assertEqual(len(basis), 8)
        gram = np.array([[np.trace(a @ b).real for b in basis] for a in basis])
        np.testing.assert_allclose(gram, np.eye(8), atol=1e-12)
        for a in basis:
            self.assertAlmostEqual(abs(np.trace(a)), 0.0)

    def test_regular_simplex_gram(self) -> None:
        for n, kappa, d in ((4, 1.0, 2), (9, 0.5, 3), (5, 0.3, 3)):
            vecs = regular_simplex(n, kappa, d, seed=7)
            self.assertEqual(len(vecs), n)
            np.testing.assert_allclose(bloch_gram(vecs), simplex_gram(n, kappa), atol=1e-12)
            np.testing.assert_allclose(sum(v.op for v in vecs), np.zeros((d, d)), atol=1e-12)

    def test_simplex_inside_inball_is_in_body(self) -> None:
        d = 3
        vecs = regular_simplex(d * d, 1.0 / (d - 1), d, seed=3)
        self.assertTrue(all(in_bloch_body(v) for v in vecs))

    def test_simplex_size_bounds(self) -> None:
        with self.assertRaises(ValueError):
            regular_simplex(10, 0.5, 3)
        with self.assertRaises(ValueError):
            regular_simplex(1, 0.5, 3)

    def test_seed_determinism(self) -> None:
        a = regular_simplex(9, 0.5, 3, seed=11)
        b = regular_simplex(9, 0.5, 3, seed=11)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.op, y.op)

    def test_gram_does_not_depend_on_seed(self) -> None:
        for n, kappa, d in ((9, 0.5, 3), (16, 1.0 / 3, 4)):
            a = regular_simplex(n, kappa, d, seed=1)
            b = regular_simplex(n, kappa, d, seed=2)
            np.testing.assert_allclose(bloch_gram(a), bloch_gram(b), atol=1e-12)
            np.testing.assert_allclose(bloch_gram(a), simplex_gram(n, kappa), atol=1e-12)
            self.assertGreater(np.linalg.norm(a[0].op - b[0].op), 1e-6)


class TestPurity(unittest.TestCase):
    def test_purity_test(self) -> None:
        rng = make_rng(5)
        v = random_pure_ket(3, rng)
        self.assertTrue(purity_test(np.outer(v, v.conj())))
        self.assertFalse(purity_test(random_density_matrix(3, rng)))


if __name__ == "__main__":
    unittest.main()
