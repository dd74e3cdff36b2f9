import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.involutions import (  # noqa: E402
    DirectSumOf,
    SwapTranspose,
    Symplectic,
    TensorOf,
    Transpose,
    TwistedTranspose,
    block_matrix_units,
    check_involution,
    find_twist,
    random_algebra_element,
    split_blocks,
    tensor_apply,
)
from qjw.linalg import SIGMA_Y, make_rng, spin_generators  # noqa: E402


class TestInvolutionAxioms(unittest.TestCase):
    def test_standard_involutions_pass(self) -> None:
        rng = make_rng(0)
        cases = [
            Transpose(3),
            Symplectic(2),
            SwapTranspose(2),
            SwapTranspose(2, SIGMA_Y),
            DirectSumOf((Transpose(2), Symplectic(1))),
            TensorOf(Transpose(2), Symplectic(1)),
        ]
        for inv in cases:
            check = check_involution(inv, rng, samples=20)
            self.assertTrue(check.ok, f"{inv.label()}: {check.residuals}")

    def test_twist_for_even_spin_factor(self) -> None:
        gens = spin_generators(4)
        c = find_twist(gens, +1)
        self.assertIsNotNone(c)
        inv = TwistedTranspose(c)
        for g in gens:
            np.testing.assert_allclose(inv.apply(g), g, atol=1e-10)
        self.assertTrue(check_involution(inv, make_rng(1), samples=20).ok)

    def test_twist_for_pauli_triple_needs_sign_flip(self) -> None:
        gens = spin_generators(3)
        self.assertIsNone(find_twist(gens, +1))
        c = find_twist(gens, -1)
        self.assertIsNotNone(c)
        for g in gens:
            np.testing.assert_allclose(c @ g.T @ c.conj().T, -g, atol=1e-10)

    def test_twist_validation(self) -> None:
        with self.assertRaises(ValueError):
            TwistedTranspose(2 * np.eye(2))
        with self.assertRaises(ValueError):
            TwistedTranspose(np.array([[0, 1], [1j, 0]]))

    def test_symplectic_negates_its_form(self) -> None:
        inv = Symplectic(1)
        # the symplectic form itself is sent to its negative
        j = np.array([[0, 1], [-1, 0]], dtype=complex)
        np.testing.assert_allclose(inv.apply(j), -j, atol=1e-12)
        np.testing.assert_allclose(inv.apply(np.eye(2)), np.eye(2), atol=1e-12)


class TestBlocks(unittest.TestCase):
    def test_split_rejects_off_block_weight(self) -> None:
        with self.assertRaises(ValueError):
            split_blocks(np.ones((4, 4)), (2, 2))
        with self.assertRaises(ValueError):
            SwapTranspose(2).apply(np.ones((4, 4)))

    def test_swap_exchanges_blocks(self) -> None:
        rng = make_rng(2)
        inv = SwapTranspose(2)
        x = random_algebra_element(inv, rng)
        a, b = split_blocks(x, (2, 2))
        a2, b2 = split_blocks(inv.apply(x), (2, 2))
        np.testing.assert_allclose(a2, b.T, atol=1e-12)
        np.testing.assert_allclose(b2, a.T, atol=1e-12)

    def test_block_units(self) -> None:
        units = block_matrix_units((2, 1))
        self.assertEqual(len(units), 5)
        self.assertTrue(all(u.shape == (3, 3) for u in units))

    def test_superoperator_vanishes_off_blocks(self) -> None:
        inv = SwapTranspose(2)
        s = inv.superoperator()
        self.assertEqual(s.shape, (16, 16))
        # E_{0,2} couples the two blocks
        np.testing.assert_array_equal(s[:, 0 * 4 + 2], np.zeros(16))
        x = random_algebra_element(inv, make_rng(3))
        np.testing.assert_allclose(s @ x.ravel(), inv.apply(x).ravel(), atol=1e-12)

    def test_transpose_superoperator_is_involutive(self) -> None:
        s = Transpose(3).superoperator()
        np.testing.assert_allclose(s @ s, np.eye(9), atol=1e-12)

    def test_tensor_apply_identity(self) -> None:
        rng = make_rng(4)
        x = rng.standard_normal((6, 6))
        out = tensor_apply(np.eye(4), np.eye(9), x, (2, 3), (2, 3))
        np.testing.assert_allclose(out, x, atol=1e-12)

    def test_tensor_of_transposes_is_full_transpose(self) -> None:
        x = random_algebra_element(Transpose(6), make_rng(5))
        inv = TensorOf(Transpose(2), Transpose(3))
        np.testing.assert_allclose(inv.apply(x), x.T, atol=1e-12)

    def test_conjugate(self) -> None:
        c = find_twist(spin_generators(4), +1)
        inv = TwistedTranspose(c)
        np.testing.assert_allclose(inv.conjugate().twist, c.conj(), atol=1e-15)
        t = Transpose(2)
        self.assertIs(t.conjugate(), t)


if __name__ == "__main__":
    unittest.main()
