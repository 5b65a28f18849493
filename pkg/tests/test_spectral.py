import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmspec.operators import build_heisenberg, trace_evolution_exact
from mmspec.protocol import TimeSeries, run_hadamard_series, run_stochastic_series, uniform_grid
from mmspec.spectral import PowerSpectrum, dft, dft_frequencies, find_peaks, interpolate_quadratic

DIMER_EIGS = np.array([-3.0, -1.0, 1.0, 3.0])


def exp_series(lam, n=64, dt=0.1, t0=0.0):
    t = t0 + dt * np.arange(n)
    return TimeSeries(t, np.exp(-1j * lam * t))


def naive_transform(series, omega):
    # direct O(N^2) sum, independent of the FFT path
    return series.dt * np.exp(1j * np.multiply.outer(omega, series.times)) @ series.values


@pytest.fixture(scope="module")
def dimer_series():
    return run_hadamard_series(build_heisenberg(2), 6.0, 0.04)


class TestDFT:
    def test_axis(self):
        spec = dft(exp_series(0.0, n=10, dt=0.5))
        assert len(spec) == 10
        assert spec.frequencies[0] == pytest.approx(-math.pi / 0.5)
        assert np.all(spec.frequencies < math.pi / 0.5)
        np.testing.assert_allclose(np.diff(spec.frequencies), 2 * math.pi / (10 * 0.5), atol=1e-12)

    def test_constant(self):
        spec = dft(exp_series(0.0))
        k = int(np.argmax(spec.magnitudes))
        assert spec.frequencies[k] == pytest.approx(0.0)
        assert np.sum(spec.magnitudes > 1e-9) == 1

    @pytest.mark.parametrize("m", [-7, -1, 3, 12])
    def test_on_grid_exponential(self, m):
        n, dt = 64, 0.1
        lam = dft_frequencies(n, dt)[n // 2 + m]
        spec = dft(exp_series(lam, n, dt))
        k = int(np.argmax(spec.magnitudes))
        assert spec.frequencies[k] == pytest.approx(lam)
        others = np.delete(spec.magnitudes, k)
        assert np.max(others) < 1e-9 * spec.magnitudes[k]

    @given(st.integers(8, 80), st.floats(0.01, 1.0), st.floats(-5, 5), st.integers(0, 2**31))
    def test_matches_direct_sum(self, n, dt, t0, seed):
        rng = np.random.default_rng(seed)
        s = TimeSeries(t0 + dt * np.arange(n), rng.normal(size=n) + 1j * rng.normal(size=n))
        spec = dft(s)
        np.testing.assert_allclose(spec.coefficients, naive_transform(s, spec.frequencies), atol=1e-9)

    @given(st.integers(4, 200), st.floats(0.01, 2.0), st.integers(0, 2**31))
    def test_parseval(self, n, dt, seed):
        rng = np.random.default_rng(seed)
        s = TimeSeries(dt * np.arange(n), rng.normal(size=n) + 1j * rng.normal(size=n))
        spec = dft(s)
        lhs = np.sum(np.abs(s.values) ** 2) * dt
        rhs = spec.spacing / (2 * math.pi) * np.sum(np.abs(spec.coefficients) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_normalize(self, dimer_series):
        spec = dft(dimer_series, normalize=True)
        assert spec.normalized and spec.magnitudes.max() == pytest.approx(1.0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            dft(TimeSeries([0, 1, 2], [1, 1, 1]))
        with pytest.raises(ValueError):
            dft(exp_series(0.0), window="kaiser")

    def test_hann_window_keeps_peaks(self):
        # the Hann main lobe is twice as wide, so a longer record is needed to split the lines
        series = run_hadamard_series(build_heisenberg(2), 24.0, 0.04)
        spec = dft(series, True, window="hann")
        peaks = find_peaks(spec, 0.2)
        assert len(peaks) == 4
        assert np.max(np.abs(np.sort(peaks.omegas) - DIMER_EIGS)) < spec.spacing


class TestPeaks:
    @given(st.floats(-12, 12))
    def test_single_exponential(self, lam):
        s = exp_series(lam, n=128, dt=0.05)
        spec = dft(s, normalize=True)
        peaks = find_peaks(spec, 0.5)
        assert len(peaks) == 1
        assert abs(peaks.peaks[0].omega - lam) < spec.spacing / 2

    def test_dimer_four_peaks(self, dimer_series):
        spec = dft(dimer_series, normalize=True)
        peaks = find_peaks(spec, 0.2)
        assert len(peaks) == 4
        assert np.max(np.abs(np.sort(peaks.omegas) - DIMER_EIGS)) < spec.spacing

    def test_zero_series(self):
        spec = dft(TimeSeries(np.arange(16) * 0.1, np.zeros(16)))
        assert len(find_peaks(spec, 0.2)) == 0

    def test_threshold_validated(self):
        spec = dft(exp_series(1.0))
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError):
                find_peaks(spec, bad)

    @given(st.floats(-2, 2))
    def test_shift_theorem(self, shift):
        base = run_hadamard_series(build_heisenberg(2), 12.0, 0.04)
        shifted = TimeSeries(base.times, base.values * np.exp(-1j * shift * base.times))
        a = np.sort(find_peaks(dft(base, True), 0.2).omegas)
        b = np.sort(find_peaks(dft(shifted, True), 0.2).omegas)
        assert len(a) == len(b) == 4
        spacing = 2 * math.pi / (len(base) * base.dt)
        assert np.max(np.abs(b - (a + shift))) < 0.5 * spacing

    def test_csv(self, dimer_series):
        spec = dft(dimer_series, True)
        text = find_peaks(spec, 0.2).to_csv()
        assert text.splitlines()[0] == "omega_est,magnitude,bin"
        assert len(text.splitlines()) == 5
        back = PowerSpectrum.from_csv_text(spec.to_csv())
        np.testing.assert_array_equal(back.magnitudes, spec.magnitudes)


class TestInterpolation:
    def test_identity(self, dimer_series):
        out = interpolate_quadratic(dimer_series, dimer_series.times)
        np.testing.assert_allclose(out.values, dimer_series.values, atol=1e-12)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_quadratic_exact(self, a, b, c):
        t = np.linspace(0, 2, 21)
        s = TimeSeries(t, a * t ** 2 + b * t + c)
        fine = np.linspace(0, 2, 997)
        out = interpolate_quadratic(s, fine)
        np.testing.assert_allclose(out.values, a * fine ** 2 + b * fine + c, atol=1e-10)

    def test_no_extrapolation(self, dimer_series):
        with pytest.raises(ValueError):
            interpolate_quadratic(dimer_series, [0.0, 6.5])
        with pytest.raises(ValueError):
            interpolate_quadratic(dimer_series, [-0.1, 1.0])

    def test_dimer_fine_grid(self, dimer_series):
        fine, _ = uniform_grid(6.0, 1e-4)
        out = interpolate_quadratic(dimer_series, fine)
        ref = trace_evolution_exact(build_heisenberg(2), fine) / 4
        assert np.max(np.abs(out.values - ref)) < 1e-3 * np.max(np.abs(ref))

    def test_interpolation_artifacts_bounded(self, dimer_series):
        fine, _ = uniform_grid(6.0, 1e-4)
        spec = dft(interpolate_quadratic(dimer_series, fine), normalize=True)
        mags = spec.magnitudes.copy()
        for lam in DIMER_EIGS:
            mags[np.abs(spec.frequencies - lam) < 2 * spec.spacing] = 0
        left, right = np.roll(mags, 1), np.roll(mags, -1)
        spurious = mags[(mags > left) & (mags >= right)]
        assert spurious.max() < 0.15

    def test_interpolated_spectrum_tracks_fine_oracle(self, dimer_series):
        H = build_heisenberg(2)
        fine, _ = uniform_grid(6.0, 1e-4)
        interp = dft(interpolate_quadratic(dimer_series, fine), normalize=True)
        direct = dft(TimeSeries(fine, trace_evolution_exact(H, fine) / 4), normalize=True)
        assert np.max(np.abs(interp.magnitudes - direct.magnitudes)) < 1e-3


def test_stochastic_and_exact_peaks_agree(dimer_series):
    H = build_heisenberg(2)
    r = run_stochastic_series(H, 1000, 6.0, 0.04, root_seed=0)
    a = np.sort(find_peaks(dft(dimer_series, True), 0.2).omegas)
    b = np.sort(find_peaks(dft(r.mean, True), 0.2).omegas)
    assert len(a) == len(b) == 4
    assert np.max(np.abs(a - b)) < dft(dimer_series).spacing
