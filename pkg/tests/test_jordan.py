import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.config import ClosureCapExceeded, ExceptionalFactorError, IdentificationError  # noqa: E402
from qjw.involutions import SwapTranspose, Symplectic, Transpose  # noqa: E402
from qjw.jordan import (  # noqa: E402
    EjaDescriptor,
    SpinElement,
    Summand,
    check_reversible,
    classify_simple,
    cstar_closure,
    decompose,
    descriptor_from_json,
    descriptor_to_json,
    envelope_name,
    fixed_point_subalg,
    identify_eja,
    jordan_closure,
    jordan_product,
    jordan_rank,
    multiplication_operator,
    parse_descriptor,
    quadratic_map,
    quadratic_rep,
    spin_embed,
    spin_product,
    standard_embedding,
)
from qjw.linalg import make_rng, random_hermitian  # noqa: E402


class TestDescriptors(unittest.TestCase):
    def test_summand_dimensions(self) -> None:
        cases = {
            ("RealSym", 3): (6, 3),
            ("ComplexHerm", 3): (9, 3),
            ("QuatHerm", 2): (6, 2),
            ("QuatHerm", 3): (15, 3),
            ("Spin", 4): (5, 2),
            ("Exceptional", 3): (27, 3),
        }
        for (kind, n), (dim, rank) in cases.items():
            s = Summand(kind, n)
            self.assertEqual((s.dim, s.rank), (dim, rank), s.name)

    def test_size_one_is_real(self) -> None:
        self.assertEqual(Summand("QuatHerm", 1), Summand("RealSym", 1))
        self.assertEqual(Summand("ComplexHerm", 1).dim, 1)

    def test_parse(self) -> None:
        desc = parse_descriptor("real:3+complex:2")
        self.assertEqual(desc.summands, (Summand("RealSym", 3), Summand("ComplexHerm", 2)))
        self.assertEqual(desc.dim, 10)
        self.assertEqual(parse_descriptor("exceptional"), EjaDescriptor.simple("Exceptional", 3))
        self.assertEqual(parse_descriptor("V:5").name, "Spin(5)")
        for bad in ("foo:2", "real:x", "real:2++complex:2", "spin:1", "exceptional:2", "quat:0"):
            with self.assertRaises(ValueError, msg=bad):
                parse_descriptor(bad)

    def test_json(self) -> None:
        desc = parse_descriptor("quat:2+spin:4")
        obj = descriptor_to_json(desc)
        self.assertEqual(obj["summands"][1], {"kind": "Spin", "n": 4})
        self.assertEqual(descriptor_from_json(obj), desc)
        with self.assertRaises(ValueError):
            descriptor_from_json({"summands": [{"kind": "Spin"}]})

    def test_canonical_order_and_names(self) -> None:
        desc = parse_descriptor("spin:4+real:2")
        self.assertEqual(desc.canonical().name, "RealSym(2) ⊕ Spin(4)")
        self.assertEqual(envelope_name((2, 2)), "M2(C) ⊕ M2(C)")


class TestSpinFactor(unittest.TestCase):
    def test_abstract_product_matches_embedding(self) -> None:
        rng = make_rng(0)
        for k in (2, 3, 4, 5):
            x = SpinElement(k, float(rng.standard_normal()), rng.standard_normal(k))
            y = SpinElement(k, float(rng.standard_normal()), rng.standard_normal(k))
            np.testing.assert_allclose(
                spin_embed(spin_product(x, y)), jordan_product(spin_embed(x), spin_embed(y)), atol=1e-12
            )

    def test_symmetries_square_to_unit(self) -> None:
        s = SpinElement.symmetry(4, 2)
        self.assertEqual(spin_product(s, s).scalar, 1.0)
        with self.assertRaises(ValueError):
            spin_product(s, SpinElement.unit(3))
        with self.assertRaises(ValueError):
            SpinElement(3, 0.0, np.zeros(2))


class TestClosures(unittest.TestCase):
    def test_standard_embeddings_close_to_themselves(self) -> None:
        cases = {
            "real:3": "RealSym(3)",
            "complex:3": "ComplexHerm(3)",
            "quat:2": "QuatHerm(2)",
            "quat:3": "QuatHerm(3)",
            "spin:4": "Spin(4)",
            "spin:6": "Spin(6)",
            # low spin factors are reported under their matrix names
            "spin:2": "RealSym(2)",
            "spin:3": "ComplexHerm(2)",
            "spin:5": "QuatHerm(2)",
        }
        for text, expected in cases.items():
            desc = parse_descriptor(text)
            ejc = standard_embedding(desc)
            sub = jordan_closure(ejc.generators)
            self.assertEqual(sub.dim, desc.dim, text)
            self.assertEqual(identify_eja(sub).name, expected, text)

    def test_direct_sum(self) -> None:
        ejc = standard_embedding(parse_descriptor("real:2+complex:2"))
        self.assertEqual(ejc.blocks, (2, 2))
        sub = jordan_closure(ejc.generators)
        self.assertEqual(sub.dim, 7)
        info = decompose(sub)
        self.assertEqual([i.summand.name for i in info], ["RealSym(2)", "ComplexHerm(2)"])
        self.assertAlmostEqual(sum(float(np.trace(i.projection).real) for i in info), 4.0)

    def test_cstar_closure(self) -> None:
        self.assertEqual(cstar_closure(standard_embedding(parse_descriptor("spin:4")).generators).dim, 16)
        self.assertEqual(cstar_closure(standard_embedding(parse_descriptor("spin:3")).generators).dim, 4)
        self.assertEqual(cstar_closure([np.diag([1.0, 0.0, 0.0])]).dim, 1)

    def test_exceptional_has_no_embedding(self) -> None:
        with self.assertRaises(ExceptionalFactorError):
            standard_embedding(parse_descriptor("exceptional"))

    def test_cap(self) -> None:
        with self.assertRaises(ClosureCapExceeded):
            jordan_closure([np.diag([1.0, 2.0, 3.0]), np.ones((3, 3))], cap=1)
        self.assertEqual(jordan_closure([np.diag([1.0, 2.0, 3.0]), np.ones((3, 3))]).dim, 6)

    def test_decompose_needs_real_subspace(self) -> None:
        with self.assertRaises(ValueError):
            decompose(cstar_closure([np.eye(2)]))


class TestClassification(unittest.TestCase):
    def test_classify_simple(self) -> None:
        self.assertEqual(classify_simple(1, 1), Summand("RealSym", 1))
        self.assertEqual(classify_simple(6, 3), Summand("RealSym", 3))
        self.assertEqual(classify_simple(9, 3), Summand("ComplexHerm", 3))
        self.assertEqual(classify_simple(15, 3), Summand("QuatHerm", 3))
        self.assertEqual(classify_simple(27, 3), Summand("Exceptional", 3))
        self.assertEqual(classify_simple(5, 2), Summand("Spin", 4))
        self.assertEqual(classify_simple(6, 2), Summand("QuatHerm", 2))
        with self.assertRaises(IdentificationError):
            classify_simple(7, 3)

    def test_jordan_rank_of_projections(self) -> None:
        sub = jordan_closure(standard_embedding(parse_descriptor("complex:3")).generators)
        self.assertEqual(jordan_rank(sub, np.diag([1.0, 0.0, 0.0])), 1)
        self.assertEqual(jordan_rank(sub, np.diag([1.0, 1.0, 0.0])), 2)
        self.assertEqual(jordan_rank(sub, np.eye(3)), 3)


class TestFixedPoints(unittest.TestCase):
    def test_fixed_point_dimensions(self) -> None:
        self.assertEqual(fixed_point_subalg(Transpose(3)).dim, 6)
        self.assertEqual(fixed_point_subalg(Symplectic(2)).dim, 6)
        self.assertEqual(fixed_point_subalg(SwapTranspose(2)).dim, 4)

    def test_symplectic_fixed_points_are_quaternionic(self) -> None:
        sub = fixed_point_subalg(Symplectic(2))
        self.assertEqual(identify_eja(sub).name, "QuatHerm(2)")


class TestReversibility(unittest.TestCase):
    def test_spin_ladder(self) -> None:
        expected = {2: True, 3: True, 4: False, 5: True, 6: False}
        for k, reversible in expected.items():
            result = check_reversible(standard_embedding(EjaDescriptor.simple("Spin", k)))
            self.assertEqual(result.reversible, reversible, f"Spin({k})")

    def test_spin4_witness(self) -> None:
        result = check_reversible(standard_embedding(EjaDescriptor.simple("Spin", 4)), max_word_len=4)
        self.assertEqual(result.witness, ("t1", "t2", "t3", "t4"))
        self.assertEqual(result.witness_text, "t1 t2 t3 t4")

    def test_matrix_algebras_are_reversible(self) -> None:
        for text in ("real:3", "complex:2", "quat:2"):
            result = check_reversible(standard_embedding(parse_descriptor(text)), max_word_len=3)
            self.assertTrue(result.reversible, text)
            self.assertEqual(result.witness_text, "")

    def test_word_length_floor(self) -> None:
        with self.assertRaises(ValueError):
            check_reversible(standard_embedding(parse_descriptor("real:2")), max_word_len=1)


class TestOperators(unittest.TestCase):
    def test_quadratic_map_is_sandwich(self) -> None:
        rng = make_rng(3)
        a, x = random_hermitian(3, rng), random_hermitian(3, rng)
        np.testing.assert_allclose(quadratic_map(a)(x), a @ x @ a, atol=1e-12)

    def test_operator_matrices(self) -> None:
        a = np.diag([2.0, 1.0])
        u = quadratic_rep(a)
        self.assertEqual(u.shape, (4, 4))
        # U_a has eigenvalues a_i a_j
        np.testing.assert_allclose(sorted(np.linalg.eigvalsh(u)), [1.0, 2.0, 2.0, 4.0], atol=1e-12)
        lmat = multiplication_operator(np.eye(2))
        np.testing.assert_allclose(lmat, np.eye(4), atol=1e-12)


if __name__ == "__main__":
    unittest.main()
