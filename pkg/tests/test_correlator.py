import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hbtsim import (
    EmptySidebandError,
    LagWindow,
    InvalidParameterError,
    PhotonStreams,
    SimParams,
    WindowTooLargeError,
    analytic_g2_zero,
    coincidence_counts,
    g2_curve,
    g2_zero_estimate,
    generate_streams,
    poisson_reference_streams,
    read_correlation_csv,
    write_correlation_csv,
)


def brute_force_xcorr(a, b):
    """Full zero-padded cross-correlation by explicit double loop.

    Returns counts[t] = sum over all (i, j) with j - i = t, for
    t in [-(N-1), N-1], independent of the implementation under test.
    """
    n = len(a)
    counts = np.zeros(2 * n - 1)
    for i in range(n):
        for j in range(n):
            counts[(j - i) + n - 1] += a[i] * b[j]
    return counts


def windowed_slice(full, n, n_sidebands):
    center = n - 1
    return full[center - n_sidebands : center + n_sidebands + 1]


def test_lag_window_validation():
    with pytest.raises(InvalidParameterError):
        LagWindow(0)
    with pytest.raises(InvalidParameterError):
        LagWindow(2.5)
    assert LagWindow().n_sidebands == 10


def test_hand_computed_example():
    streams = PhotonStreams(a=np.array([1.0, 0.0, 1.0]), b=np.array([0.0, 1.0, 0.0]))
    counts = coincidence_counts(streams, LagWindow(1))
    assert counts.tolist() == [1.0, 0.0, 1.0]


def test_perfect_spe_has_zero_center():
    streams = generate_streams(SimParams(sigma=0.0, pulses=20000), 3)
    counts = coincidence_counts(streams, LagWindow(10))
    assert counts[10] == 0.0


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_windowed_counts_match_brute_force(data):
    n = data.draw(st.integers(3, 64), label="stream_length")
    n_side = data.draw(st.integers(1, min(8, (n - 1) // 2)), label="sidebands")
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1), label="seed"))
    a = rng.integers(0, 3, n).astype(float) * rng.random(n)
    b = rng.integers(0, 3, n).astype(float) * rng.random(n)
    streams = PhotonStreams(a=a, b=b)
    counts = coincidence_counts(streams, LagWindow(n_side))
    expected = windowed_slice(brute_force_xcorr(a, b), n, n_side)
    assert counts == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_window_too_large():
    streams = PhotonStreams(a=np.zeros(20), b=np.zeros(20))
    with pytest.raises(WindowTooLargeError):
        coincidence_counts(streams, LagWindow(10))  # needs 21 > 20
    coincidence_counts(PhotonStreams(a=np.zeros(21), b=np.zeros(21)), LagWindow(10))


def test_empty_sidebands_raise():
    streams = poisson_reference_streams(0.0, 0.0, 1000, 1)
    with pytest.raises(EmptySidebandError):
        g2_zero_estimate(streams, LagWindow(5))


class TestG2Zero:
    def test_perfect_spe_is_exactly_zero(self):
        streams = generate_streams(SimParams(sigma=0.0, pulses=20000), 7)
        assert g2_zero_estimate(streams, LagWindow(10)) == 0.0

    def test_symmetric_noise_at_crossing(self):
        sigma = math.sqrt(2.0) - 1.0
        values = [
            g2_zero_estimate(
                generate_streams(SimParams(sigma=sigma, pulses=20000), seed),
                LagWindow(10),
            )
            for seed in range(5)
        ]
        assert np.mean(values) == pytest.approx(0.5, abs=0.03)

    def test_poisson_baseline_is_one(self):
        streams = poisson_reference_streams(1.0, 1.0, 100000, 12)
        assert g2_zero_estimate(streams, LagWindow(10)) == pytest.approx(1.0, abs=0.05)

    def test_poisson_unequal_rates_normalize_away(self):
        streams = poisson_reference_streams(2.0, 0.5, 100000, 12)
        assert g2_zero_estimate(streams, LagWindow(10)) == pytest.approx(1.0, abs=0.05)

    def test_detector_swap_invariance(self):
        streams = generate_streams(
            SimParams(sigma=0.5, xi=0.2, chi=-0.3, pulses=20000), 9
        )
        swapped = PhotonStreams(a=streams.b, b=streams.a)
        window = LagWindow(10)
        counts = coincidence_counts(streams, window)
        counts_swapped = coincidence_counts(swapped, window)
        assert counts_swapped == pytest.approx(counts[::-1], rel=1e-12)
        assert g2_zero_estimate(swapped, window) == pytest.approx(
            g2_zero_estimate(streams, window), rel=1e-12
        )

    def test_scale_invariance(self):
        streams = generate_streams(SimParams(sigma=0.4, pulses=10000), 15)
        window = LagWindow(8)
        reference = g2_zero_estimate(streams, window)
        # power-of-two scaling is lossless, so the ratio is bit-identical
        doubled = PhotonStreams(a=streams.a * 4.0, b=streams.b * 4.0)
        assert g2_zero_estimate(doubled, window) == reference
        scaled = PhotonStreams(a=streams.a * 1.7, b=streams.b * 1.7)
        assert g2_zero_estimate(scaled, window) == pytest.approx(reference, rel=1e-12)


class TestG2Curve:
    def test_noiseless_curve_shape(self):
        streams = generate_streams(SimParams(sigma=0.0, pulses=20000), 4)
        result = g2_curve(streams, LagWindow(10))
        assert result.g2_curve[10] == 0.0
        sidebands = np.delete(result.g2_curve, 10)
        mean_counts = result.sideband_mean
        assert sidebands == pytest.approx(1.0, abs=5 / math.sqrt(mean_counts))

    def test_noisy_center_matches_oracle(self):
        params = SimParams(sigma=0.6, pulses=20000)
        expected = analytic_g2_zero(params)  # 0.609375
        assert expected == pytest.approx(0.609375, abs=1e-12)
        values = [
            g2_curve(generate_streams(params, seed), LagWindow(10)).g2_zero
            for seed in range(5)
        ]
        assert np.mean(values) == pytest.approx(expected, abs=0.04)

    def test_sideband_mean_is_one(self):
        streams = generate_streams(
            SimParams(sigma=0.8, xi=-0.1, chi=0.2, pulses=15000), 2
        )
        result = g2_curve(streams, LagWindow(10))
        sidebands = np.delete(result.g2_curve, 10)
        assert sidebands.mean() == pytest.approx(1.0, abs=1e-12)

    def test_center_consistency(self):
        streams = generate_streams(SimParams(sigma=0.3, pulses=5000), 6)
        result = g2_curve(streams, LagWindow(6))
        assert result.g2_zero == result.g2_curve[6]
        assert result.center_counts == result.coincidences[6]
        assert result.lags.tolist() == list(range(-6, 7))
        assert result.g2_zero == g2_zero_estimate(streams, LagWindow(6))

    def test_determinism(self):
        streams = generate_streams(SimParams(sigma=0.5, pulses=8000), 10)
        first = g2_curve(streams, LagWindow(10))
        second = g2_curve(streams, LagWindow(10))
        assert np.array_equal(first.coincidences, second.coincidences)
        assert np.array_equal(first.g2_curve, second.g2_curve)
        assert first.g2_zero == second.g2_zero


def test_estimator_matches_oracle_on_coarse_grid():
    # 5-sigma agreement between Monte Carlo replicates and the closed form,
    # allowing one outlier cell across the whole grid.
    replicates = 8
    pulses = 20000
    window = LagWindow(10)
    failures = 0
    cells = 0
    for sigma in (0.0, 0.2, 0.5, 1.0):
        for xi in (-0.4, 0.0, 0.4):
            for chi in (-0.5, 0.0, 0.5):
                cells += 1
                params = SimParams(sigma=sigma, xi=xi, chi=chi, pulses=pulses)
                expected = analytic_g2_zero(params)
                values = np.array(
                    [
                        g2_zero_estimate(generate_streams(params, 1000 + r), window)
                        for r in range(replicates)
                    ]
                )
                spread = values.std(ddof=1)
                if spread == 0.0:
                    if abs(values.mean() - expected) > 1e-12:
                        failures += 1
                elif abs(values.mean() - expected) > 5 * spread / math.sqrt(replicates):
                    failures += 1
    assert failures <= math.floor(0.05 * cells)


def test_correlation_csv_round_trip(tmp_path):
    streams = generate_streams(SimParams(sigma=0.45, xi=0.1, pulses=5000), 33)
    result = g2_curve(streams, LagWindow(7))
    path = tmp_path / "corr.csv"
    write_correlation_csv(result, path)
    text = path.read_text().splitlines()
    assert text[0].startswith("# g2_zero=")
    assert text[3] == "lag,coincidences,g2"
    loaded = read_correlation_csv(path)
    assert np.array_equal(loaded.lags, result.lags)
    assert np.array_equal(loaded.coincidences, result.coincidences)
    assert np.array_equal(loaded.g2_curve, result.g2_curve)
    assert loaded.g2_zero == result.g2_zero
    assert loaded.center_counts == result.center_counts
    assert loaded.sideband_mean == result.sideband_mean
