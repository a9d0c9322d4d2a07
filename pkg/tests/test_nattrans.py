"""Coefficient series: extraction, application, the morphism-origin checker."""

import random
from fractions import Fraction as F

import pytest

from superweil import (
    AlgebraError,
    ParityError,
    SuperDomain,
    TruncatedFormalSeries,
    apply_morphism_to_point,
    apply_series,
    check_comes_from_morphism,
    make_apoint,
    make_domain_morphism,
    make_grassmann,
    make_truncated,
    series_from_morphism,
)
from superweil import expr as ex
from superweil.battery import rand_domain_morphism, rand_point
from superweil.expr import parse_expr, polynomials_equal
from superweil.nattrans import NECESSITY_NOTE

U12 = SuperDomain(1, 2)
V10 = SuperDomain(1, 0)

SAMPLES = [(F(1),), (F(-1),), (F(2),), (F(1, 2),)]


def poly_eq(e, text, p=1):
    return polynomials_equal(e, parse_expr(text, p, 0))


class TestSeriesFromMorphism:
    def test_graded_shift_pullback(self):
        phi = make_domain_morphism(U12, V10, ["x1 + theta1*theta2"])
        series = series_from_morphism(phi, 2)
        cmap = series.coeffs[0]
        assert poly_eq(cmap[((0,), ())], "x1")
        assert poly_eq(cmap[((1,), ())], "1")
        assert ((2,), ()) not in cmap
        assert poly_eq(cmap[((0,), (1, 2))], "1")
        assert ((1,), (1, 2)) not in cmap

    def test_identity_morphism(self):
        U = SuperDomain(1, 0)
        series = series_from_morphism(make_domain_morphism(U, U, ["x1"]), 2)
        cmap = series.coeffs[0]
        assert set(cmap) == {((0,), ()), ((1,), ())}
        assert poly_eq(cmap[((0,), ())], "x1")
        assert poly_eq(cmap[((1,), ())], "1")

    def test_exp_pullback_coefficients(self):
        U = SuperDomain(1, 0)
        series = series_from_morphism(make_domain_morphism(U, U, ["exp(x1)"]), 2)
        cmap = series.coeffs[0]
        for n in range(3):
            e = cmap[((n,), ())]
            got = [
                _eval_even(e, v) for v in (0.0, 0.5)
            ]
            import math

            want = [math.exp(v) / math.factorial(n) for v in (0.0, 0.5)]
            assert got == pytest.approx(want, rel=1e-12)

    def test_slot_parity_enforced(self):
        with pytest.raises(ParityError):
            TruncatedFormalSeries(
                (1, 2), (1, 0), 2, ({((0,), (1,)): ex.ONE},)
            )


def _eval_even(e, v):
    from superweil.superfunc import eval_expr_classical
    from superweil.fields import REAL

    return eval_expr_classical(e, (v,), REAL)


class TestApplySeries:
    def test_matches_direct_application(self):
        phi = make_domain_morphism(U12, V10, ["x1 + theta1*theta2"])
        series = series_from_morphism(phi, 2)
        g = make_grassmann(2)
        x = make_apoint(U12, g, [g.scalar(2)], [g.gen_odd(1), g.gen_odd(2)])
        assert apply_series(series, x)[0] == g.scalar(2) + g.gen_odd(1) * g.gen_odd(2)

    def test_scalar_point_reads_base_coefficient(self):
        phi = make_domain_morphism(U12, V10, ["x1^2 + theta1*theta2"])
        series = series_from_morphism(phi, 3)
        k = make_truncated(0, 0, 1)
        x = make_apoint(U12, k, [k.scalar(3)], [k.zero(), k.zero()])
        assert apply_series(series, x)[0] == k.scalar(9)

    def test_round_trip_against_point_application(self):
        rng = random.Random(31)
        source = SuperDomain(2, 2)
        target = SuperDomain(1, 1)
        a = make_truncated(1, 2, 3)
        for _ in range(25):
            phi = rand_domain_morphism(rng, source, target)
            series = series_from_morphism(phi, 4)
            x = rand_point(rng, source, a)
            direct = apply_morphism_to_point(phi, x)
            via_series = apply_series(series, x)
            assert via_series == list(direct.even_vals + direct.odd_vals)

    def test_height_above_truncation_rejected(self):
        phi = make_domain_morphism(U12, V10, ["x1 + theta1*theta2"])
        series = series_from_morphism(phi, 1)
        g = make_grassmann(2)
        x = make_apoint(U12, g, [g.scalar(1)], [g.gen_odd(1), g.gen_odd(2)])
        with pytest.raises(AlgebraError):
            apply_series(series, x)


class TestChecker:
    def test_morphism_series_pass(self):
        rng = random.Random(32)
        source = SuperDomain(1, 2)
        target = SuperDomain(2, 1)
        for _ in range(10):
            phi = rand_domain_morphism(rng, source, target)
            series = series_from_morphism(phi, 3)
            report = check_comes_from_morphism(series, SAMPLES)
            assert report.passed
            assert report.note == NECESSITY_NOTE

    def test_quadratic_base_with_no_linear_term_fails(self):
        series = TruncatedFormalSeries(
            (1, 0), (1, 0), 2, ({((0,), ()): parse_expr("x1^2", 1, 0)},)
        )
        report = check_comes_from_morphism(series, SAMPLES)
        assert not report.passed
        v = report.violations[0]
        assert (v.slot, v.direction) == (1, 1)

    def test_constant_map_passes(self):
        series = TruncatedFormalSeries(
            (1, 0), (1, 0), 2, ({((0,), ()): ex.Const(F(5))},)
        )
        assert check_comes_from_morphism(series, SAMPLES).passed

    def test_single_coefficient_perturbations_detected(self):
        phi = make_domain_morphism(
            SuperDomain(1, 2), SuperDomain(1, 1), ["x1^2 + x1*theta1*theta2", "x1*theta1"]
        )
        series = series_from_morphism(phi, 3)
        for k, cmap in enumerate(series.coeffs):
            for key in cmap:
                if sum(key[0]) < 1:
                    continue  # an order-0 shift is itself a morphism series
                slots = [dict(c) for c in series.coeffs]
                slots[k][key] = ex.add(slots[k][key], ex.ONE)
                bumped = TruncatedFormalSeries(
                    series.source_dims, series.target_dims, series.order, tuple(slots)
                )
                assert not check_comes_from_morphism(bumped, SAMPLES).passed

    def test_non_evaluable_coefficient_flagged_not_fatal(self):
        series = TruncatedFormalSeries(
            (1, 0),
            (1, 0),
            1,
            ({((0,), ()): parse_expr("x1", 1, 0), ((1,), ()): parse_expr("log(x1)", 1, 0)},),
        )
        report = check_comes_from_morphism(series, [(-1.0,), (1.0,)])
        notes = [v.note for v in report.violations]
        assert any("not evaluable" in n for n in notes)
        assert any("recursion violated" in n for n in notes)

    def test_report_json_shape(self):
        series = TruncatedFormalSeries(
            (1, 0), (1, 0), 2, ({((0,), ()): parse_expr("x1^2", 1, 0)},)
        )
        blob = check_comes_from_morphism(series, SAMPLES).to_json()
        assert blob["passed"] is False
        assert blob["note"] == NECESSITY_NOTE
        assert blob["violations"][0]["slot"] == 1
