"""Frequency grids, designs, periodograms and trigonometric closed forms."""

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oscseg import fourier
from oscseg.errors import DegenerateFrequencyError, InputError
from oscseg.fourier import (
    FrequencyGrid,
    build_grid_equal,
    build_grid_periodogram,
    continuity_compatible_frequencies,
    design,
    gram_identity,
    lagrange_cos_sum,
    lagrange_sin_sum,
    periodogram,
    window_gram,
)

from conftest import direct_gram_sum


class TestEqualGrid:
    def test_p1(self):
        assert build_grid_equal(1).freqs.tolist() == [0.25]

    def test_p3(self):
        np.testing.assert_allclose(
            build_grid_equal(3).freqs, [0.125, 0.25, 0.375], atol=1e-15
        )

    def test_p500_bounds(self):
        g = build_grid_equal(500)
        assert g.p == 500
        assert g.freqs[0] > 0.0
        assert g.freqs[-1] < 0.5
        assert np.all(np.diff(g.freqs) > 0)

    def test_invalid_p(self):
        with pytest.raises(InputError):
            build_grid_equal(0)


class TestPeriodogram:
    def test_matches_direct_sum(self):
        rng = np.random.default_rng(7)
        for n in (16, 37, 100):
            y = rng.normal(size=n)
            pg = periodogram(y)
            t = np.arange(n)
            for j in range(1, n // 2 + 1):
                c = np.sum(y * np.cos(2 * np.pi * j * t / n))
                s = np.sum(y * np.sin(2 * np.pi * j * t / n))
                assert pg.powers[j - 1] == pytest.approx(
                    (c * c + s * s) / n, abs=1e-9
                )

    def test_pure_sine_unique_peak(self):
        t = np.arange(1, 101)
        pg = periodogram(np.sin(2 * np.pi * 0.1 * t))
        k = int(np.argmax(pg.powers))
        assert pg.freqs[k] == pytest.approx(0.1)
        others = np.delete(pg.powers, k)
        assert pg.powers[k] > 10 * others.max()

    def test_zero_series(self):
        assert np.all(periodogram(np.zeros(50)).powers == 0.0)

    def test_constant_series_dust(self):
        c, n = 3.7, 64
        pg = periodogram(np.full(n, c))
        assert pg.powers.max() <= 1e-18 * c * c * n

    def test_too_short(self):
        with pytest.raises(InputError):
            periodogram(np.ones(3))

    def test_non_finite(self):
        with pytest.raises(InputError):
            periodogram(np.array([1.0, np.nan, 2.0, 3.0]))


class TestPeriodogramGrid:
    def test_single_dominant_frequency(self):
        t = np.arange(1, 101)
        g = build_grid_periodogram(np.sin(2 * np.pi * t / 10), 1)
        np.testing.assert_allclose(g.freqs, [0.1])

    def test_all_canonical_odd_n(self):
        n = 101
        y = np.random.default_rng(3).normal(size=n)
        g = build_grid_periodogram(y, n // 2)
        np.testing.assert_allclose(g.freqs, np.arange(1, n // 2 + 1) / n)

    def test_even_n_nyquist_never_selectable(self):
        n = 100
        y = np.random.default_rng(4).normal(size=n)
        with pytest.raises(InputError):
            build_grid_periodogram(y, n // 2)
        g = build_grid_periodogram(y, n // 2 - 1)
        assert g.freqs.max() < 0.5 - 1e-9

    def test_scenario1_grid_contains_true_frequencies(self):
        from oscseg.simgen import gen_scenario1

        y, _, _ = gen_scenario1("gauss1", seed=0)
        g = build_grid_periodogram(y, 50)
        for f in (1 / 24, 1 / 15, 1 / 7, 1 / 12, 1 / 22, 1 / 25):
            assert np.min(np.abs(g.freqs - f)) <= 1.0 / y.size

    def test_tie_break_prefers_lower_frequency(self):
        # Exactly flat spectrum: a unit impulse spreads power evenly.
        y = np.zeros(32)
        y[0] = 1.0
        g = build_grid_periodogram(y, 3)
        np.testing.assert_allclose(g.freqs, [1 / 32, 2 / 32, 3 / 32])

    def test_multivariate_average(self):
        t = np.arange(1, 201)
        panel = np.stack(
            [np.sin(2 * np.pi * 0.1 * t), np.sin(2 * np.pi * 0.2 * t)]
        )
        g = build_grid_periodogram(panel, 2)
        np.testing.assert_allclose(g.freqs, [0.1, 0.2])


class TestDesign:
    def test_quarter_frequency_one_sample(self):
        dp = design(FrequencyGrid(np.array([0.25])), (0, 1))
        np.testing.assert_allclose(dp.sin_cols, [[1.0]], atol=1e-12)
        np.testing.assert_allclose(dp.cos_cols, [[0.0]], atol=1e-12)

    def test_quarter_frequency_four_samples(self):
        dp = design(FrequencyGrid(np.array([0.25])), (0, 4))
        np.testing.assert_allclose(dp.sin_cols[:, 0], [1, 0, -1, 0], atol=1e-12)
        np.testing.assert_allclose(dp.cos_cols[:, 0], [0, -1, 0, 1], atol=1e-12)

    def test_absolute_window_pointwise(self):
        freqs = np.array([0.05, 0.17, 0.31, 0.44])
        dp = design(FrequencyGrid(freqs), (100, 200))
        t = np.arange(101, 201, dtype=float)
        for k, f in enumerate(freqs):
            np.testing.assert_allclose(dp.sin_cols[:, k], np.sin(2 * np.pi * f * t))
            np.testing.assert_allclose(dp.cos_cols[:, k], np.cos(2 * np.pi * f * t))

    def test_invalid_window(self):
        g = FrequencyGrid(np.array([0.25]))
        with pytest.raises(InputError):
            design(g, (5, 5))
        with pytest.raises(InputError):
            design(g, (-1, 3))


class TestGramIdentities:
    def test_sin_sin_same_example(self):
        assert gram_identity("sin_sin_same", np.pi / 2, None, 2) == pytest.approx(1.0)

    def test_sin_cos_same_example(self):
        got = gram_identity("sin_cos_same", 0.7, None, 50)
        assert got == pytest.approx(direct_gram_sum("sin_cos_same", 0.7, None, 50), abs=1e-10)

    def test_cos_cos_cross_example(self):
        got = gram_identity("cos_cos_cross", 0.5, 0.9, 200)
        assert got == pytest.approx(direct_gram_sum("cos_cos_cross", 0.5, 0.9, 200), abs=1e-9)

    def test_all_kinds_random(self):
        rng = np.random.default_rng(11)
        kinds = fourier._GRAM_KINDS
        checked = 0
        while checked < 1000:
            t1, t2 = rng.uniform(0.05, np.pi - 0.05, size=2)
            if min(abs(np.sin((t1 - t2) / 2)), abs(np.sin((t1 + t2) / 2))) < 1e-3:
                continue
            n = int(rng.integers(1, 501))
            for kind in kinds:
                got = gram_identity(kind, t1, t2, n)
                assert got == pytest.approx(
                    direct_gram_sum(kind, t1, t2, n), abs=1e-9
                ), (kind, t1, t2, n)
            checked += 1

    def test_degenerate_denominator_raises(self):
        with pytest.raises(DegenerateFrequencyError):
            gram_identity("sin_sin_same", 1e-13, None, 10)
        with pytest.raises(DegenerateFrequencyError):
            gram_identity("sin_sin_cross", 0.7, 0.7, 10)

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            gram_identity("sin_tan_same", 0.5, None, 3)

    def test_diagonal_near_half_n(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            t1 = rng.uniform(0.05, np.pi - 0.05)
            n = int(rng.integers(1, 1001))
            bound = 0.25 + 0.25 / abs(np.sin(t1))
            assert abs(gram_identity("sin_sin_same", t1, None, n) - n / 2) <= bound
            assert abs(gram_identity("cos_cos_same", t1, None, n) - n / 2) <= bound

    def test_off_diagonal_bounded_in_n(self):
        # The cross sums stay below a bound depending only on the angles.
        rng = np.random.default_rng(13)
        for _ in range(100):
            t1, t2 = rng.uniform(0.05, np.pi - 0.05, size=2)
            dm, dp = (t1 - t2) / 2, (t1 + t2) / 2
            if min(abs(np.sin(dm)), abs(np.sin(dp))) < 1e-2:
                continue
            bound = 0.5 / abs(np.sin(dm)) + 0.5 / abs(np.sin(dp)) + 1.0
            n = int(rng.integers(10, 400))
            for m in (n, 2 * n, 4 * n):
                for kind in ("sin_sin_cross", "cos_cos_cross", "sin_cos_cross"):
                    assert abs(gram_identity(kind, t1, t2, m)) <= bound


@settings(deadline=None, max_examples=200)
@given(
    delta=st.floats(-10.0, 10.0),
    n=st.integers(1, 300),
)
def test_lagrange_sums_match_direct(delta, n):
    # The closed forms are only claimed away from degenerate denominators.
    assume(abs(np.sin(delta / 2)) > 1e-6)
    t = np.arange(1, n + 1)
    np.testing.assert_allclose(
        float(lagrange_cos_sum(delta, n)), np.sum(np.cos(delta * t)), atol=1e-8
    )
    np.testing.assert_allclose(
        float(lagrange_sin_sum(delta, n)), np.sum(np.sin(delta * t)), atol=1e-8
    )


class TestWindowGram:
    def test_matches_dense_design(self):
        rng = np.random.default_rng(21)
        freqs = np.sort(rng.uniform(0.02, 0.48, size=8))
        grid = FrequencyGrid(freqs)
        u, v = 37, 190
        dp = design(grid, (u, v))
        ss, sc, cc = window_gram(grid.theta, u, v)
        np.testing.assert_allclose(ss, dp.sin_cols.T @ dp.sin_cols, atol=1e-9)
        np.testing.assert_allclose(sc, dp.sin_cols.T @ dp.cos_cols, atol=1e-9)
        np.testing.assert_allclose(cc, dp.cos_cols.T @ dp.cos_cols, atol=1e-9)

    def test_prefix_difference_consistency(self):
        grid = build_grid_equal(6)
        parts = [window_gram(grid.theta, u, v) for u, v in ((10, 40), (40, 90))]
        whole = window_gram(grid.theta, 10, 90)
        for a, b, w in zip(*parts, whole):
            np.testing.assert_allclose(a + b, w, atol=1e-9)


class TestContinuityFrequencies:
    def test_unit_boundary(self):
        np.testing.assert_allclose(
            continuity_compatible_frequencies(0.2, 1), [0.2, 0.3], atol=1e-12
        )

    def test_boundary_four(self):
        np.testing.assert_allclose(
            continuity_compatible_frequencies(0.1, 4),
            [0.1, 0.15, 0.35, 0.4],
            atol=1e-12,
        )

    def test_members_preserve_boundary_value(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            w1 = rng.uniform(0.02, 0.48)
            t0 = int(rng.integers(1, 40))
            beta = rng.uniform(-3.0, 3.0, size=2)
            left = beta[0] * np.sin(2 * np.pi * w1 * t0) + beta[1] * np.cos(
                2 * np.pi * w1 * t0
            )
            for w2 in continuity_compatible_frequencies(w1, t0, beta=tuple(beta)):
                right = beta[0] * np.sin(2 * np.pi * w2 * t0) + beta[1] * np.cos(
                    2 * np.pi * w2 * t0
                )
                assert abs(left - right) <= 1e-9

    def test_contains_own_frequency(self):
        for w1, t0 in ((0.13, 3), (0.31, 7), (0.49, 2)):
            got = continuity_compatible_frequencies(w1, t0)
            assert np.min(np.abs(got - w1)) <= 1e-12

    def test_invalid_arguments(self):
        with pytest.raises(InputError):
            continuity_compatible_frequencies(0.6, 3)
        with pytest.raises(InputError):
            continuity_compatible_frequencies(0.2, 0)


class TestFrequencyGridValidation:
    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            FrequencyGrid(np.array([0.0, 0.2]))
        with pytest.raises(InputError):
            FrequencyGrid(np.array([0.2, 0.5]))

    def test_rejects_unsorted(self):
        with pytest.raises(InputError):
            FrequencyGrid(np.array([0.3, 0.2]))

    def test_from_values_dedup(self):
        g = FrequencyGrid.from_values([0.2, 0.2, 0.1])
        np.testing.assert_allclose(g.freqs, [0.1, 0.2])
