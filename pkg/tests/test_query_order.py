import itertools
import unittest

from grand_mo.query_order import (
    BurstPattern,
    QueryOrderSpec,
    constrained_order,
    constrained_step_count,
    count_runs_patterns,
    count_subclass,
    hamming_order,
    iter_patterns,
    markov_order,
    query_count,
    worst_case_steps,
)


def all_patterns(n):
    for bits in itertools.product((0, 1), repeat=n):
        yield BurstPattern.from_positions(n, [i + 1 for i, bit in enumerate(bits) if bit])


class BurstPatternTest(unittest.TestCase):
    def test_positions_are_merged_into_maximal_bursts(self):
        pattern = BurstPattern.from_positions(10, [2, 3, 4, 7, 9, 10])

        self.assertEqual(pattern.runs, ((2, 3), (7, 1), (9, 2)))
        self.assertEqual((pattern.m, pattern.weight), (3, 6))
        self.assertEqual(pattern.cost(2), 10)
        self.assertEqual(str(pattern), "2:3,7:1,9:2")

    def test_touching_runs_are_merged(self):
        self.assertEqual(BurstPattern.from_runs(8, [(1, 2), (3, 1)]).runs, ((1, 3),))

    def test_invalid_runs(self):
        with self.assertRaises(ValueError):
            BurstPattern(5, ((4, 3),))
        with self.assertRaises(ValueError):
            BurstPattern(8, ((1, 2), (3, 1)))

    def test_zero_pattern(self):
        zero = BurstPattern.zero(6)

        self.assertEqual((zero.m, zero.weight, zero.cost(3)), (0, 0, 0))
        self.assertTrue(zero.to_bitvector().is_zero())


class QueryOrderSpecTest(unittest.TestCase):
    def test_canonical_strings(self):
        self.assertEqual(QueryOrderSpec.markov(2, 3).canonical(), "markov(dl=2,dmax=3)")
        self.assertEqual(QueryOrderSpec.markov(2, 3).canonical("auto"), "markov(dl=auto,dmax=3)")
        self.assertEqual(QueryOrderSpec.constrained(32, 16).canonical(), "constrained(l1=32,l2=16)")
        self.assertEqual(QueryOrderSpec.hamming(3).canonical(), "hamming(ab=3)")

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            QueryOrderSpec.markov(0, 3)
        with self.assertRaises(ValueError):
            QueryOrderSpec.constrained(4, 5)
        with self.assertRaises(ValueError):
            QueryOrderSpec.hamming(0)
        with self.assertRaises(ValueError):
            list(constrained_order(6, 7, 1))


class MarkovOrderTest(unittest.TestCase):
    def test_sixty_patterns_for_n6_dl2_dmax3(self):
        patterns = list(markov_order(6, 2, 3))

        self.assertEqual(patterns[0], BurstPattern.zero(6))
        nonzero = patterns[1:]
        self.assertEqual(len(nonzero), 60)
        by_bursts = [sum(1 for p in nonzero if p.m == m) for m in (1, 2, 3)]
        self.assertEqual(by_bursts, [21, 35, 4])

    def test_matches_exhaustive_run_oracle(self):
        for n, dl, dmax in [(6, 2, 3), (7, 1, 2), (8, 3, 2), (9, 2, 3)]:
            with self.subTest(n=n, dl=dl, dmax=dmax):
                last_cost = dmax + (dmax - 1) * dl
                expected = {
                    p for p in all_patterns(n) if 1 <= p.m <= dmax and p.cost(dl) <= last_cost
                }
                emitted = list(markov_order(n, dl, dmax))[1:]

                self.assertEqual(len(emitted), len(set(emitted)))
                self.assertEqual(set(emitted), expected)
                self.assertEqual(query_count(QueryOrderSpec.markov(dl, dmax), n), len(expected))

    def test_emission_order_within_classes(self):
        dl = 2
        keys = [
            (p.cost(dl), p.m, tuple(length for _, length in p.runs), tuple(s for s, _ in p.runs))
            for p in list(markov_order(9, dl, 3))[1:]
        ]

        self.assertEqual(keys, sorted(keys))

    def test_run_count_oracle(self):
        for n in range(1, 10):
            patterns = list(all_patterns(n))
            for m in range(1, (n + 1) // 2 + 1):
                with self.subTest(n=n, m=m):
                    self.assertEqual(count_runs_patterns(n, m), sum(1 for p in patterns if p.m == m))
                    self.assertEqual(
                        sum(count_subclass(n, m, weight) for weight in range(m, n + 1)),
                        count_runs_patterns(n, m),
                    )

    def test_worst_case_count_at_8_db(self):
        self.assertEqual(query_count(QueryOrderSpec.markov(33, 3), 127), 3_677_132)


class ConstrainedOrderTest(unittest.TestCase):
    def test_small_instance_groups(self):
        groups = list(constrained_order(6, 4, 3))

        self.assertEqual(len(groups), 11)
        self.assertEqual(groups[0], (BurstPattern.zero(6),))
        self.assertEqual(len(groups[1]), 18)
        self.assertEqual(sum(len(group) for group in groups[1:]), 52)
        self.assertEqual(query_count(QueryOrderSpec.constrained(4, 3), 6), 52)

    def test_single_burst_step_order(self):
        singles = list(constrained_order(5, 2, 0))[1]

        self.assertEqual(
            [str(p) for p in singles],
            ["1:1", "1:2", "2:1", "2:2", "3:1", "3:2", "4:1", "4:2", "5:1"],
        )

    def test_two_burst_steps_anchor_the_first_burst(self):
        groups = list(constrained_order(7, 3, 2))
        first_step = groups[2]

        self.assertTrue(all(p.runs[0] == (1, 1) for p in first_step))
        self.assertEqual(str(first_step[0]), "1:1,3:1")
        self.assertEqual(str(first_step[-1]), "1:1,7:1")
        # le pas suivant ancre le premier burst en position 2
        self.assertTrue(all(p.runs[0] == (2, 1) for p in groups[3]))

    def test_groups_partition_the_pattern_universe(self):
        n, l1, l2 = 10, 4, 3
        groups = list(constrained_order(n, l1, l2))
        flat = [p for group in groups for p in group]

        self.assertEqual(len(flat), len(set(flat)))
        expected = {
            p
            for p in all_patterns(n)
            if p.m == 0
            or (p.m == 1 and p.weight <= l1)
            or (p.m == 2 and p.runs[0][1] <= l2 and p.runs[1][1] <= l1)
        }
        self.assertEqual(set(flat), expected)

    def test_step_counts(self):
        self.assertEqual(worst_case_steps(128, 32), 3538)
        self.assertEqual(worst_case_steps(79, 0), 2)
        self.assertEqual(worst_case_steps(6, 3), 11)
        for n in range(4, 15):
            for l2 in range(0, n - 1):
                with self.subTest(n=n, l2=l2):
                    groups = list(constrained_order(n, max(l2, 1), l2))
                    self.assertEqual(len(groups), worst_case_steps(n, l2))
                    self.assertEqual(
                        sum(len(g) for g in groups[1:]),
                        query_count(QueryOrderSpec.constrained(max(l2, 1), l2), n),
                    )

    def test_second_burst_limit_beyond_n_minus_two(self):
        self.assertEqual(constrained_step_count(5, 4), worst_case_steps(5, 3))
        self.assertEqual(len(list(constrained_order(5, 5, 4))), worst_case_steps(5, 3))
        with self.assertRaises(ValueError):
            worst_case_steps(5, 4)

    def test_worst_case_count_for_l1_32_l2_8(self):
        # burst court ancré à gauche ; voir « Pire cas contraint(32,8) » dans DESIGN.md
        self.assertEqual(query_count(QueryOrderSpec.constrained(32, 8), 127), 1_466_928)


class HammingOrderTest(unittest.TestCase):
    def test_weight_one(self):
        self.assertEqual([str(p) for p in hamming_order(5, 1)][1:], ["1:1", "2:1", "3:1", "4:1", "5:1"])

    def test_supports_in_lexicographic_order(self):
        patterns = list(hamming_order(6, 3))[1:]
        supports = [p.positions() for p in patterns]

        self.assertEqual(len(patterns), 6 + 15 + 20)
        self.assertEqual(supports, sorted(supports, key=lambda s: (len(s), s)))
        self.assertEqual(supports[6], (1, 2))

    def test_iter_patterns_starts_with_zero(self):
        first = next(iter_patterns(QueryOrderSpec.hamming(2), 4))

        self.assertEqual(first, BurstPattern.zero(4))
        self.assertEqual(query_count(QueryOrderSpec.hamming(3), 8), 92)


if __name__ == "__main__":
    unittest.main()
