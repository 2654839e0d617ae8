"""Tests for resultants, discriminants, projection, and ordering cost ranking."""
import random

import pytest

from strategies import permutations, polynomials
from hypothesis import given, settings

from varord.cadcost import (
    CostReport,
    det_bareiss,
    det_cofactor,
    discriminant,
    projection_cost,
    projection_step,
    rank_orderings,
    resultant,
)
from varord.polysys import (
    Polynomial,
    PolySystem,
    all_permutations,
    apply_permutation,
    parse_poly,
    parse_system,
    permute_label,
)


def P(text: str, nvars: int = 3) -> Polynomial:
    return parse_poly(text, nvars)


def random_system(rng: random.Random, max_polys=2, max_terms=3, max_deg=2) -> PolySystem:
    polys = []
    for _ in range(rng.randint(1, max_polys)):
        while True:
            terms = {}
            for _ in range(rng.randint(1, max_terms)):
                mono = tuple(rng.randint(0, max_deg) for _ in range(3))
                terms[mono] = terms.get(mono, 0) + rng.choice([-3, -2, -1, 1, 2, 3])
            p = Polynomial(3, terms)
            if not p.is_zero():
                polys.append(p)
                break
    return PolySystem(tuple(polys), 3)


class TestResultant:
    def test_linear_pair_is_ad_minus_bc(self):
        r = resultant(P("2*x1 + 3"), P("5*x1 + 7"), 0)
        assert r == P("-1")  # 2*7 - 3*5

    def test_shared_root_gives_zero(self):
        r = resultant(P("x1^2 - 1"), P("x1 - 1"), 0)
        assert r.is_zero()

    def test_three_by_three_sylvester(self):
        assert resultant(P("x1^2 + x2"), P("2*x1"), 0) == P("4*x2")

    def test_degree_zero_input_rejected(self):
        with pytest.raises(ValueError):
            resultant(P("x2"), P("x1"), 0)

    @settings(max_examples=60, deadline=None)
    @given(
        polynomials(max_degree=2, max_terms=3, rationals=False),
        polynomials(max_degree=2, max_terms=3, rationals=False),
    )
    def test_swap_symmetry(self, p, q):
        dp, dq = p.degree_in(0), q.degree_in(0)
        if dp < 1 or dq < 1:
            return
        lhs = resultant(p, q, 0)
        rhs = resultant(q, p, 0)
        assert lhs == (rhs if (dp * dq) % 2 == 0 else -rhs)


class TestDiscriminant:
    def test_monic_quadratic_with_parameter_coefficients(self):
        # raw convention: res(p, dp/dx1) without sign or content normalization
        assert discriminant(P("x1^2 + x2*x1 + x3"), 0) == P("-x2^2 + 4*x3")

    def test_repeated_root_gives_zero(self):
        assert discriminant(P("x1^2"), 0).is_zero()

    def test_matches_resultant_with_derivative(self):
        assert discriminant(P("x1^2 + x2"), 0) == P("4*x2")

    def test_degree_below_two_rejected(self):
        with pytest.raises(ValueError):
            discriminant(P("x1 + x2"), 0)


class TestDeterminantBackends:
    def test_bareiss_matches_cofactor_up_to_5x5(self):
        rng = random.Random(20240811)
        for size in range(1, 6):
            for _ in range(6):
                matrix = [
                    [
                        Polynomial(
                            3,
                            {
                                (0, 0, 0): rng.randint(-4, 4),
                                (1, 0, 0): rng.randint(-2, 2),
                                (0, 1, 0): rng.randint(-2, 2),
                            },
                        )
                        for _ in range(size)
                    ]
                    for _ in range(size)
                ]
                assert det_bareiss(matrix) == det_cofactor(matrix)

    def test_singular_matrix(self):
        row = [P("x1"), P("x2")]
        assert det_bareiss([row, row]).is_zero()


class TestProjectionStep:
    def test_single_quadratic(self):
        out = projection_step([P("x1^2 + x2")], 0)
        assert out == (P("x2"),)

    def test_degree_zero_poly_passes_through(self):
        out = projection_step([P("x2 + 1")], 0)
        assert out == (P("x2 + 1"),)

    def test_pair_of_lines_collapses_to_one(self):
        out = projection_step([P("x1 - x2"), P("x1 + x2")], 0)
        assert out == (P("x2"),)

    def test_eliminated_variable_absent(self):
        rng = random.Random(7)
        for _ in range(25):
            s = random_system(rng, max_polys=3, max_terms=3, max_deg=2)
            for v in range(3):
                for q in projection_step(s.polys, v):
                    assert q.degree_in(v) == 0

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            projection_step([], 0)


class TestProjectionCost:
    def test_univariate_system_has_no_levels(self):
        s = parse_system("vars 1; x1^2 - 1")
        report = projection_cost(s, 0)
        assert report.per_level == ()
        assert report.total_polys == 0
        assert report.total_sotd == 0

    def test_single_level_example(self):
        s = parse_system("vars 2; x1^2 + x2")
        report = projection_cost(s, 0)  # ordering (x1, x2)
        assert len(report.per_level) == 1
        assert report.per_level[0].num_polys == 1
        assert report.per_level[0].sotd == 1
        assert report.total_sotd == 1

    def test_symmetry_invariance_on_adapted_example(self):
        s = parse_system(
            "vars 3; 68*x1^2 - 12*x3*x2 + 46*x3 - 126;"
            " -54*x2*x1 + 11*x1 + 92*x2 - 42*x3*x2*x1 - 35"
        )
        for sigma in all_permutations(3):
            permuted = apply_permutation(s, sigma)
            for label in range(6):
                assert projection_cost(permuted, permute_label(label, sigma)) == projection_cost(
                    s, label
                )

    def test_symmetry_invariance_on_random_systems(self):
        rng = random.Random(99)
        for _ in range(20):
            s = random_system(rng)
            base = [projection_cost(s, lab) for lab in range(6)]
            for sigma in all_permutations(3):
                permuted = apply_permutation(s, sigma)
                for label in range(6):
                    assert projection_cost(permuted, permute_label(label, sigma)) == base[label]

    def test_report_json_roundtrip(self):
        s = parse_system("vars 3; x1^2 + x2*x3 - 1; x1 + x3")
        report = projection_cost(s, 3)
        assert CostReport.from_json_dict(report.to_json_dict()) == report


class TestRankOrderings:
    def test_fully_symmetric_system_ties_at_label_zero(self):
        table = rank_orderings(parse_system("vars 3; x1 + x2 + x3"))
        assert len(set(table.costs)) == 1
        assert table.argmin_label == 0
        assert table.tie is True

    def test_high_degree_variable_changes_cost(self):
        s = parse_system("vars 3; x1^4*x2 + 1; x3 + 1")
        table = rank_orderings(s)
        # label 0 eliminates x1 first, label 4 eliminates x3 first
        assert table.costs[0] != table.costs[4]

    def test_argmin_equivariance_on_non_tied_systems(self):
        rng = random.Random(4242)
        checked = 0
        while checked < 50:
            s = random_system(rng)
            table = rank_orderings(s)
            if table.tie:
                continue
            checked += 1
            for sigma in all_permutations(3):
                permuted_table = rank_orderings(apply_permutation(s, sigma))
                assert permuted_table.argmin_label == permute_label(table.argmin_label, sigma)

    def test_positive_scaling_leaves_costs_unchanged(self):
        rng = random.Random(11)
        for _ in range(10):
            s = random_system(rng)
            scaled = PolySystem(tuple(p.scale(7) for p in s.polys), 3)
            assert rank_orderings(scaled) == rank_orderings(s)

    def test_too_many_variables_rejected(self):
        polys = (Polynomial(6, {(1, 0, 0, 0, 0, 0): 1}),)
        with pytest.raises(ValueError):
            rank_orderings(PolySystem(polys, 6))
