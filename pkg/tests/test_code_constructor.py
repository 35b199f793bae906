import unittest
from itertools import combinations

import galois
import numpy as np

from grand_mo.code_constructor import (
    LinearCode,
    bch_generator_polynomial,
    code_from_parity_check,
    dump_parity_check,
    encode,
    load_parity_check,
    make_bch,
    make_rlc,
)
from grand_mo.gf2_algebra import BitMatrix, BitVector, syndrome
from grand_mo.grand_decoders import bdd_decode
from grand_mo.query_order import BurstPattern

REPETITION_6 = "6 1\n100001\n010001\n001001\n000101\n000011\n"


def random_message(code, rng):
    return BitVector.from_bits(rng.integers(0, 2, size=code.k, dtype=np.uint8))


class RandomLinearCodeTest(unittest.TestCase):
    def test_dimensions_and_determinism(self):
        code = make_rlc(128, 104, seed=1)

        self.assertEqual((code.n, code.k, code.redundancy), (128, 104, 24))
        self.assertIsNone(code.d)
        self.assertEqual(code.label, "rlc(128,104)")
        self.assertEqual(make_rlc(128, 104, seed=1).H, code.H)
        self.assertNotEqual(make_rlc(128, 104, seed=2).H, code.H)

    def test_encode_then_extract_message(self):
        code = make_rlc(40, 20, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(20):
            message = random_message(code, rng)
            codeword = encode(code, message)

            self.assertTrue(syndrome(code.H, codeword).is_zero())
            self.assertEqual(code.extract_message(codeword), message)

    def test_invalid_dimensions(self):
        with self.assertRaises(ValueError):
            make_rlc(4, 4, seed=1)
        with self.assertRaises(ValueError):
            make_rlc(4, 0, seed=1)


class BchCodeTest(unittest.TestCase):
    def test_generator_polynomial_of_bch_15_7(self):
        self.assertEqual(bch_generator_polynomial(4, 2), galois.Poly.Degrees([8, 7, 6, 4, 0]))

    def test_bch_127_106(self):
        code = make_bch(7, 3)

        self.assertEqual((code.n, code.k, code.d), (127, 106, 7))
        self.assertEqual(code.label, "bch(127,106)")

    def test_narrow_sense_double_error_code_has_fourteen_parity_bits(self):
        code = make_bch(7, 2)

        self.assertEqual((code.n, code.k, code.d), (127, 113, 5))

    def test_expurgated_and_shortened_79_64(self):
        code = make_bch(7, 2, shorten_by=48, expurgate=True)

        self.assertEqual((code.n, code.k, code.redundancy, code.d), (79, 64, 15, 6))

    def test_every_codeword_is_a_multiple_of_the_generator(self):
        code = make_bch(4, 2)
        generator = bch_generator_polynomial(4, 2)
        rng = np.random.default_rng(1)
        for _ in range(10):
            codeword = encode(code, random_message(code, rng))
            # position j porte le coefficient de x^{n-j}
            polynomial = galois.Poly(codeword.to_bits().tolist())

            self.assertEqual(polynomial % generator, galois.Poly.Zero())

    def test_short_bursts_are_always_detected(self):
        code = make_bch(7, 3)
        for length in range(1, code.redundancy + 1):
            for start in range(1, code.n - length + 2):
                burst = BurstPattern(code.n, ((start, length),)).to_bitvector()

                self.assertFalse(syndrome(code.H, burst).is_zero(), (start, length))

    def test_low_weight_patterns_have_nonzero_syndrome(self):
        code = make_bch(7, 3)
        rng = np.random.default_rng(5)
        for _ in range(200):
            weight = int(rng.integers(1, code.d))
            positions = rng.choice(np.arange(1, code.n + 1), size=weight, replace=False)
            pattern = BurstPattern.from_positions(code.n, positions.tolist()).to_bitvector()

            self.assertFalse(syndrome(code.H, pattern).is_zero())

    def test_errors_up_to_weight_three_land_in_distinct_cosets(self):
        code = make_bch(7, 3)
        weights = 1 << np.arange(code.redundancy, dtype=np.int64)
        columns = weights @ code.H.to_bits().astype(np.int64)
        syndromes = np.concatenate([
            np.bitwise_xor.reduce(columns[np.array(list(combinations(range(code.n), weight)))], axis=1)
            for weight in (1, 2, 3)
        ])

        self.assertEqual(len(syndromes), 127 + 8001 + 333375)
        self.assertNotIn(0, syndromes)
        self.assertEqual(len(np.unique(syndromes)), len(syndromes))

    def test_hamming_equivalent_15_11_corrects_every_single_error(self):
        code = make_bch(4, 1)
        rng = np.random.default_rng(6)

        self.assertEqual((code.n, code.k, code.d), (15, 11, 3))
        for _ in range(64):
            codeword = encode(code, random_message(code, rng))
            for position in range(1, code.n + 1):
                result = bdd_decode(code, codeword ^ BitVector.unit(position, code.n), 1)
                with self.subTest(position=position):
                    self.assertEqual(result.codeword, codeword)

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            make_bch(2, 1)
        with self.assertRaises(ValueError):
            make_bch(4, 0)
        with self.assertRaises(ValueError):
            make_bch(4, 2, shorten_by=7)


class ParityCheckFileTest(unittest.TestCase):
    def test_load_repetition_code(self):
        code = load_parity_check(REPETITION_6)

        self.assertEqual((code.n, code.k), (6, 1))
        self.assertEqual(encode(code, BitVector.from_string("1")), BitVector.from_string("111111"))

    def test_dump_then_load_keeps_h(self):
        code = make_rlc(30, 18, seed=4)

        text = dump_parity_check(code, provenance="grand-mo 0.1.0 argv=gen-code seed=4")
        loaded = load_parity_check(text)

        self.assertTrue(text.startswith("# grand-mo"))
        self.assertEqual(text.splitlines()[1], "30 18")
        self.assertEqual(loaded.H, code.H)
        self.assertEqual(loaded.k, code.k)

    def test_loaded_code_can_be_used_for_encoding(self):
        code = load_parity_check(dump_parity_check(make_bch(4, 2)))
        rng = np.random.default_rng(2)
        codeword = encode(code, random_message(code, rng))

        self.assertTrue(syndrome(code.H, codeword).is_zero())
        self.assertEqual(code.G @ code.G_inv, BitMatrix.identity(code.k))

    def test_malformed_files_are_rejected(self):
        malformed = [
            "",
            "6\n100001\n",
            "6 1\n100001\n010001\n001001\n000101\n",
            "6 1\n100001\n010001\n001001\n000101\n00001\n",
            "6 1\n100001\n010001\n001001\n000101\n00002x\n",
            # lignes dépendantes
            "4 2\n1100\n1100\n",
        ]
        for text in malformed:
            with self.subTest(text=text), self.assertRaises(ValueError):
                load_parity_check(text)

    def test_code_from_parity_check_builds_null_space(self):
        H = BitMatrix.from_bits([[1, 1, 0, 1, 0, 0], [0, 1, 1, 0, 1, 0], [1, 0, 1, 0, 0, 1]])

        code = code_from_parity_check(H)

        self.assertEqual(code.k, 3)
        self.assertFalse((code.H @ code.G.transpose()).words.any())

    def test_inconsistent_matrices_are_rejected(self):
        code = make_rlc(10, 5, seed=1)
        other = make_rlc(10, 5, seed=2)

        with self.assertRaises(ValueError):
            LinearCode(n=10, k=5, H=code.H, G=other.G, G_inv=other.G_inv)


if __name__ == "__main__":
    unittest.main()
