"""Seeded scenario generators: exact means, moments and feasibility rules."""

import numpy as np
import pytest
from scipy.stats import kurtosis

from oscseg.errors import InputError
from oscseg.simgen import (
    _segment_mean,
    gen_piecewise_ar,
    gen_scenario1,
    gen_scenario2,
    gen_scenario3,
    gen_tvar,
    gen_white_noise,
    min_spacing_for,
    sample_change_points,
    tvar_coefficient,
)


def scenario1_expected_mean():
    T = 900
    t = np.arange(1, T + 1, dtype=float)
    mean = np.empty(T)
    s1 = slice(0, 300)
    mean[s1] = (
        2 * np.sin(2 * np.pi * t[s1] / 24)
        + 3 * np.cos(2 * np.pi * t[s1] / 24)
        + 4 * np.sin(2 * np.pi * t[s1] / 15)
        + 5 * np.cos(2 * np.pi * t[s1] / 15)
        + 1 * np.sin(2 * np.pi * t[s1] / 7)
        + 2.5 * np.cos(2 * np.pi * t[s1] / 7)
    )
    s2 = slice(300, 650)
    mean[s2] = 4 * np.sin(2 * np.pi * t[s2] / 12) + 3 * np.cos(2 * np.pi * t[s2] / 12)
    s3 = slice(650, 900)
    mean[s3] = (
        2.5 * np.sin(2 * np.pi * t[s3] / 22)
        + 4 * np.cos(2 * np.pi * t[s3] / 22)
        + 4 * np.sin(2 * np.pi * t[s3] / 25)
        + 2 * np.cos(2 * np.pi * t[s3] / 25)
    )
    return mean


class TestScenario1:
    def test_noiseless_series_equals_stated_mean(self):
        y, partition, mean = gen_scenario1("gauss1", seed=0, sigma=0.0)
        np.testing.assert_allclose(y, scenario1_expected_mean(), atol=1e-12)
        np.testing.assert_allclose(mean, scenario1_expected_mean(), atol=1e-12)
        assert partition.cps.tolist() == [300, 650]
        assert partition.T == 900

    def test_seed_determinism(self):
        y1, _, _ = gen_scenario1("gauss1", seed=42)
        y2, _, _ = gen_scenario1("gauss1", seed=42)
        np.testing.assert_array_equal(y1, y2)
        y3, _, _ = gen_scenario1("gauss1", seed=43)
        assert not np.array_equal(y1, y3)

    def test_noise_scales(self):
        resid1 = gen_scenario1("gauss1", seed=1)[0] - scenario1_expected_mean()
        resid3 = gen_scenario1("gauss3", seed=1)[0] - scenario1_expected_mean()
        assert 0.9 < np.std(resid1) < 1.1
        assert 2.7 < np.std(resid3) < 3.3

    def test_student_t_heavy_tails(self):
        pooled = np.concatenate(
            [
                gen_scenario1("t3", seed=s)[0] - scenario1_expected_mean()
                for s in range(10)
            ]
        )
        assert kurtosis(pooled, fisher=True) > 0.5

    def test_m1_noise_is_dependent_and_inflated(self):
        pooled = np.concatenate(
            [
                gen_scenario1("m1", seed=s)[0] - scenario1_expected_mean()
                for s in range(10)
            ]
        )
        assert 1.1 < np.var(pooled) < 3.0

    def test_unknown_variant(self):
        with pytest.raises(InputError):
            gen_scenario1("cauchy", seed=0)

    def test_sigma_override_rejected_off_gaussian(self):
        with pytest.raises(InputError):
            gen_scenario1("t3", seed=0, sigma=2.0)


class TestChangePointSampling:
    def test_minimum_spacing_holds(self):
        T = 1000
        spacing = min_spacing_for(T)
        for seed in range(100):
            rng = np.random.default_rng(seed)
            m = int(rng.integers(1, 6))
            cps = sample_change_points(T, m, spacing, rng)
            bounds = np.concatenate(([0], cps, [T]))
            assert np.all(np.diff(bounds) >= spacing)

    def test_spacing_by_length(self):
        assert min_spacing_for(900) == 100
        assert min_spacing_for(5000) == 200
        assert min_spacing_for(10000) == 300

    def test_infeasible_count_raises(self):
        rng = np.random.default_rng(0)
        with pytest.raises(InputError):
            sample_change_points(1000, 10, 100, rng)


class TestScenario2:
    def test_change_point_count_and_noise(self):
        y, truth = gen_scenario2(T=1000, m=3, seed=0)
        assert truth.partition.m == 3
        assert y.shape == (1000,)
        resid = y - truth.mean
        assert 2.5 < np.std(resid) < 3.5

    def test_m_zero_single_segment(self):
        y, truth = gen_scenario2(T=500, m=0, seed=1)
        assert truth.partition.m == 0
        assert len(truth.partition.segments()) == 1

    def test_consecutive_assignments_differ(self):
        for seed in range(10):
            _, truth = gen_scenario2(T=1000, m=4, seed=seed)
            labels = [row[0] for row in truth.assignment]
            assert all(a != b for a, b in zip(labels, labels[1:]))

    def test_continuity_gap_below_tolerance(self):
        for seed in range(5):
            _, truth = gen_scenario2(T=1000, m=3, continuity=True, seed=seed)
            spec = truth.specs[0]
            cps = truth.partition.cps
            for j, b in enumerate(cps):
                t = np.array([float(b)])
                left = _segment_mean(spec.segments[j].components, t)[0]
                right = _segment_mean(spec.segments[j + 1].components, t)[0]
                assert abs(right - left) <= 1e-6

    def test_continuity_keeps_frequencies(self):
        _, plain = gen_scenario2(T=1000, m=2, seed=7)
        _, cont = gen_scenario2(T=1000, m=2, continuity=True, seed=7)
        for a, b in zip(plain.specs[0].segments, cont.specs[0].segments):
            assert [c.freq for c in a.components] == [c.freq for c in b.components]

    def test_seed_determinism(self):
        y1, _ = gen_scenario2(T=1000, m=3, seed=5)
        y2, _ = gen_scenario2(T=1000, m=3, seed=5)
        np.testing.assert_array_equal(y1, y2)


class TestScenario3:
    def test_shared_change_points_and_shapes(self):
        panel, truth = gen_scenario3(d=4, T=1000, m=3, seed=0)
        assert panel.shape == (4, 1000)
        assert truth.mean.shape == (4, 1000)
        assert truth.partition.m == 3

    def test_noise_split_variances(self):
        hits = 0
        for seed in range(10):
            panel, truth = gen_scenario3(d=10, T=1000, m=2, d1=4, seed=seed)
            resid_std = np.std(panel - truth.mean, axis=1)
            if np.all(resid_std[:4] < 6.0) and np.all(resid_std[4:] > 6.0):
                hits += 1
        assert hits == 10

    def test_default_split_is_all_quiet(self):
        panel, truth = gen_scenario3(d=3, T=1000, m=2, seed=1)
        assert truth.sigmas == [3.0, 3.0, 3.0]

    def test_invalid_split(self):
        with pytest.raises(InputError):
            gen_scenario3(d=3, T=1000, m=2, d1=5, seed=0)


class TestPiecewiseAr:
    def test_partition_and_length(self):
        y, partition = gen_piecewise_ar(seed=0)
        assert y.shape == (1024,)
        assert partition.cps.tolist() == [512, 768]

    def test_piece2_companion_modulus(self):
        roots = np.roots([1.0, -1.69, 0.81])
        np.testing.assert_allclose(np.abs(roots), [0.9, 0.9], atol=1e-12)

    def test_first_piece_lag1_autocorrelation(self):
        acs = []
        for seed in range(10):
            y, _ = gen_piecewise_ar(seed=seed)
            a = y[:512]
            a = a - a.mean()
            acs.append(np.sum(a[1:] * a[:-1]) / np.sum(a * a))
        assert abs(np.mean(acs) - 0.9) < 0.05

    def test_seed_determinism(self):
        np.testing.assert_array_equal(
            gen_piecewise_ar(seed=3)[0], gen_piecewise_ar(seed=3)[0]
        )


class TestTvar:
    def test_coefficient_endpoints(self):
        assert tvar_coefficient(np.array([1.0]))[0] == pytest.approx(
            0.8 * (1 - 0.5 * np.cos(np.pi / 1031)), abs=1e-12
        )
        assert tvar_coefficient(np.array([1031.0]))[0] == pytest.approx(1.2)

    def test_spectral_peak_monotone(self):
        y, peak = gen_tvar(seed=0)
        assert y.shape == (1031,)
        assert peak.shape == (1031,)
        assert np.all(np.diff(peak) <= 1e-12)
        assert np.all((peak > 0) & (peak < 0.5))

    def test_peak_matches_ar2_formula(self):
        # cos(2 pi w*) = phi1 (1 - phi2) / (-4 phi2) with phi2 = -0.81.
        _, peak = gen_tvar(seed=0)
        t = np.arange(1, 1032, dtype=float)
        a = tvar_coefficient(t)
        expected = np.arccos(np.clip(a * 1.81 / 3.24, -1, 1)) / (2 * np.pi)
        np.testing.assert_allclose(peak, expected, atol=1e-12)


class TestWhiteNoise:
    def test_defaults_and_moments(self):
        y = gen_white_noise(seed=0)
        assert y.shape == (1000,)
        assert abs(y.mean()) < 5 * 3.0 / np.sqrt(1000)
        assert 2.7 < y.std() < 3.3

    def test_no_dominant_spectral_peak(self):
        from oscseg.fourier import periodogram

        for seed in range(5):
            pg = periodogram(gen_white_noise(seed=seed))
            g = pg.powers.max() / pg.powers.sum()
            assert g < 0.05

    def test_seed_determinism(self):
        np.testing.assert_array_equal(
            gen_white_noise(seed=9), gen_white_noise(seed=9)
        )
