import itertools
import unittest

import numpy as np

from grand_mo.code_constructor import encode, load_parity_check, make_bch, make_rlc
from grand_mo.gf2_algebra import BitVector, syndrome
from grand_mo.grand_decoders import (
    BoundedDistanceDecoder,
    DecodeStatus,
    SyndromeTable,
    bdd_decode,
    grand_mo_decode,
    grandab_decode,
)
from grand_mo.query_order import (
    BurstPattern,
    OrderKind,
    QueryOrderSpec,
    constrained_order,
    iter_patterns,
    query_count,
)

REPETITION_6 = "6 1\n100001\n010001\n001001\n000101\n000011\n"

ORACLE_ORDERS = (
    [QueryOrderSpec.markov(dl, 2) for dl in (1, 2, 3)]
    + [QueryOrderSpec.constrained(l1, l2) for l1 in range(1, 5) for l2 in range(1, l1 + 1)]
    + [QueryOrderSpec.hamming(ab) for ab in (1, 2, 3)]
)


def scan(code, received, spec):
    """Parcours naïf de la séquence matérialisée : (motif, requêtes, pas)."""
    if spec.kind is OrderKind.CONSTRAINED:
        numbered = [
            (step, pattern)
            for step, group in enumerate(constrained_order(code.n, spec.l1, spec.l2), start=1)
            for pattern in group
        ]
    else:
        numbered = [(None, pattern) for pattern in iter_patterns(spec, code.n)]

    for queries, (step, pattern) in enumerate(numbered, start=1):
        if syndrome(code.H, received ^ pattern.to_bitvector()).is_zero():
            return pattern, queries, step if step is not None else queries
    last_step = numbered[-1][0]
    return None, len(numbered), last_step if last_step is not None else len(numbered)


class SyndromeTableTest(unittest.TestCase):
    def test_burst_syndromes_are_prefix_differences(self):
        code = make_rlc(20, 12, seed=9)
        table = SyndromeTable(code)
        for start, end in itertools.combinations_with_replacement(range(1, 21), 2):
            burst = BurstPattern(code.n, ((start, end - start + 1),)).to_bitvector()

            np.testing.assert_array_equal(
                table.burst(start, end - start + 1), syndrome(code.H, burst).words
            )

    def test_multiword_syndromes(self):
        code = make_rlc(160, 80, seed=1)
        table = SyndromeTable(code)
        runs = np.array([[[3, 5], [40, 2]], [[1, 1], [100, 30]]])

        syndromes = table.of_runs(runs)

        self.assertEqual(syndromes.shape, (2, 2))
        for row, pattern_runs in zip(syndromes, runs):
            pattern = BurstPattern(code.n, tuple(map(tuple, pattern_runs.tolist()))).to_bitvector()
            np.testing.assert_array_equal(row, syndrome(code.H, pattern).words)


class GrandMoDecodeTest(unittest.TestCase):
    def test_matches_brute_force_scan_on_every_received_vector(self):
        code = make_rlc(8, 4, seed=11)
        for spec in ORACLE_ORDERS:
            for value in range(256):
                received = BitVector.from_int(value, 8)
                with self.subTest(order=spec.canonical(), received=str(received)):
                    pattern, queries, steps = scan(code, received, spec)
                    result = grand_mo_decode(code, received, spec)

                    self.assertEqual(result.error_pattern, pattern)
                    self.assertEqual(result.queries, queries)
                    self.assertEqual(result.time_steps, steps)
                    if pattern is None:
                        self.assertIs(result.status, DecodeStatus.ABANDONED)
                    else:
                        self.assertEqual(result.codeword, received ^ pattern.to_bitvector())

    def test_noiseless_word_needs_one_query(self):
        code = make_bch(7, 3)
        codeword = encode(code, BitVector.from_int(12345, code.k))

        result = grand_mo_decode(code, codeword, QueryOrderSpec.markov(33, 3))

        self.assertTrue(result.decoded)
        self.assertEqual(result.error_pattern, BurstPattern.zero(code.n))
        self.assertEqual((result.queries, result.time_steps), (1, 1))

    def test_corrects_a_long_burst_on_bch_127_106(self):
        code = make_bch(7, 3)
        message = BitVector.from_bits(np.random.default_rng(4).integers(0, 2, size=code.k, dtype=np.uint8))
        noise = BurstPattern(code.n, ((60, 9),))

        result = grand_mo_decode(code, encode(code, message) ^ noise.to_bitvector(), QueryOrderSpec.markov(33, 3))

        self.assertTrue(result.decoded)
        self.assertEqual(result.error_pattern, noise)
        self.assertEqual(result.message, message)

    def test_corrects_two_bursts_on_multiword_code(self):
        code = make_rlc(160, 80, seed=2)
        message = BitVector.from_int(2**79 + 12345, code.k)
        noise = BurstPattern(code.n, ((70, 3), (140, 2)))

        result = grand_mo_decode(code, encode(code, message) ^ noise.to_bitvector(), QueryOrderSpec.constrained(4, 3))

        self.assertEqual(result.error_pattern, noise)
        self.assertEqual(result.message, message)

    def test_abandons_when_the_coset_needs_three_bursts(self):
        code = load_parity_check(REPETITION_6)
        spec = QueryOrderSpec.markov(1, 2)

        result = grand_mo_decode(code, BitVector.from_string("101010"), spec)

        self.assertIs(result.status, DecodeStatus.ABANDONED)
        self.assertIsNone(result.codeword)
        self.assertEqual(result.queries, 1 + query_count(spec, 6))

    def test_constrained_abandon_reports_last_step(self):
        code = load_parity_check(REPETITION_6)

        result = grand_mo_decode(code, BitVector.from_string("101010"), QueryOrderSpec.constrained(4, 3))

        self.assertIs(result.status, DecodeStatus.ABANDONED)
        self.assertEqual((result.queries, result.time_steps), (53, 11))

    def test_decoding_is_invariant_under_codeword_shifts(self):
        code = make_rlc(24, 12, seed=7)
        rng = np.random.default_rng(9)
        for trial in range(1000):
            spec = ORACLE_ORDERS[trial % len(ORACLE_ORDERS)]
            received = BitVector.from_bits(rng.integers(0, 2, size=code.n, dtype=np.uint8))
            codeword = encode(code, BitVector.from_bits(rng.integers(0, 2, size=code.k, dtype=np.uint8)))

            direct = grand_mo_decode(code, received, spec)
            shifted = grand_mo_decode(code, received ^ codeword, spec)

            with self.subTest(trial=trial):
                self.assertEqual(
                    (shifted.status, shifted.error_pattern, shifted.queries, shifted.time_steps),
                    (direct.status, direct.error_pattern, direct.queries, direct.time_steps),
                )

    def test_grandab_is_the_hamming_order(self):

        code = make_rlc(12, 6, seed=5)
        received = BitVector.from_string("101100111000")

        self.assertEqual(grandab_decode(code, received, 2), grand_mo_decode(code, received, QueryOrderSpec.hamming(2)))

    def test_wrong_length_is_rejected(self):
        with self.assertRaises(ValueError):
            grand_mo_decode(make_rlc(8, 4, seed=1), BitVector.zeros(7), QueryOrderSpec.hamming(1))


class BoundedDistanceDecodeTest(unittest.TestCase):
    def setUp(self):
        self.code = make_bch(4, 2)
        self.codeword = encode(self.code, BitVector.from_string("1011001"))

    def test_corrects_every_pattern_up_to_t(self):
        for weight in (1, 2):
            for support in itertools.combinations(range(1, 16), weight):
                noise = BurstPattern.from_positions(15, support)
                with self.subTest(support=support):
                    result = bdd_decode(self.code, self.codeword ^ noise.to_bitvector(), 2)

                    self.assertTrue(result.decoded)
                    self.assertEqual(result.codeword, self.codeword)
                    self.assertEqual((result.queries, result.time_steps), (1, 1))

    def test_beyond_t_never_returns_a_close_wrong_answer(self):
        noise = BurstPattern.from_positions(15, [1, 5, 9])

        result = bdd_decode(self.code, self.codeword ^ noise.to_bitvector(), 2)

        if result.decoded:
            self.assertNotEqual(result.codeword, self.codeword)
            self.assertLessEqual(result.error_pattern.weight, 2)
        else:
            self.assertIsNone(result.message)

    def test_first_pattern_in_hamming_order_wins_collisions(self):
        decoder = BoundedDistanceDecoder(make_rlc(8, 4, seed=11), 2)
        for value in range(256):
            received = BitVector.from_int(value, 8)
            expected = grand_mo_decode(decoder.code, received, QueryOrderSpec.hamming(2))
            with self.subTest(received=str(received)):
                self.assertEqual(decoder.decode(received).error_pattern, expected.error_pattern)

    def test_recovers_weight_three_errors_on_bch_127_106(self):
        code = make_bch(7, 3)
        rng = np.random.default_rng(12)
        for _ in range(200):
            codeword = encode(code, BitVector.from_bits(rng.integers(0, 2, size=code.k, dtype=np.uint8)))
            support = sorted(rng.choice(np.arange(1, code.n + 1), size=3, replace=False).tolist())
            noise = BurstPattern.from_positions(code.n, support)

            result = bdd_decode(code, codeword ^ noise.to_bitvector(), 3)

            with self.subTest(support=support):
                self.assertEqual(result.codeword, codeword)
                self.assertEqual(result.error_pattern, noise)

    def test_agrees_with_hamming_order_on_every_word_of_bch_15_11(self):
        code = make_bch(4, 1)
        spec = QueryOrderSpec.hamming(1)
        for value in range(2**code.n):
            received = BitVector.from_int(value, code.n)
            result = bdd_decode(code, received, 1)
            if result.decoded:
                self.assertEqual(result.error_pattern, grand_mo_decode(code, received, spec).error_pattern)

    def test_requires_known_distance_and_valid_radius(self):

        with self.assertRaises(ValueError):
            bdd_decode(make_rlc(15, 7, seed=1), BitVector.zeros(15), 1)
        with self.assertRaises(ValueError):
            bdd_decode(self.code, BitVector.zeros(15), 3)


if __name__ == "__main__":
    unittest.main()
