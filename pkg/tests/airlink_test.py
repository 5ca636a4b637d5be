import logging
from math import gcd

import numpy as np
import pytest

from semiblind.airlink import (
    FrameLayout,
    FrameTiming,
    awgn,
    build_frame,
    build_pilot_matrix,
    calibrate_sigma2,
    map_symbols,
    qam_constellation,
    synthesize_rx,
    zadoff_chu,
)
from semiblind.channel import reference_channel, sample_scenario
from semiblind.harness import SystemConfig
from semiblind.metrics import empirical_snr


small_config = SystemConfig(m_x=4, m_y=4, k_users=3, pilots=5, data_symbols=5, n_blocks=4, update_interval=2)


def test_frame_timing_answer():
    logging.info('TESTING OFDM NUMEROLOGY')
    timing = FrameTiming.from_spacing(120e3, 4096, 288, subcarrier=3)

    assert timing.t_sl == pytest.approx(1. / 120e3)
    assert timing.t_cp == pytest.approx(288. / 4096. / 120e3)
    assert timing.symbol_period == pytest.approx(timing.t_sl + timing.t_cp)
    assert timing.frequency() == pytest.approx(3 * 120e3)
    assert timing.frequency(0) == 0.
    assert timing.timestamps([0, 2]) == [0., 2 * timing.symbol_period]

    with pytest.raises(ValueError):
        FrameTiming.from_spacing(120e3, 4096, 288, subcarrier=4096)
    with pytest.raises(ValueError):
        FrameTiming(t_s=0., n_sc=4096, n_cp=288)


def test_frame_layout_answer():
    logging.info('TESTING FRAME LAYOUT')
    layout = FrameLayout()

    assert layout.total_symbols == 15 + 50 * 15
    assert layout.pilot_symbols() == range(0, 15)
    assert layout.block_symbols(0) == range(0, 15)
    assert layout.block_symbols(1) == range(15, 30)
    assert layout.block_symbols(50) == range(750, 765)
    assert layout.data_columns(2) == slice(15, 30)
    assert layout.scheduled_blocks() == [5, 10, 15, 20, 25, 30, 35, 40, 45, 50]
    assert layout.is_scheduled(10)
    assert not layout.is_scheduled(11)

    with pytest.raises(ValueError):
        layout.block_symbols(51)
    with pytest.raises(ValueError):
        FrameLayout(n_blocks=4, update_interval=5)
    with pytest.raises(ValueError):
        FrameLayout(p=0)


def test_zadoff_chu_cyclic_shifts_are_orthogonal():
    logging.info('TESTING ZADOFF-CHU ORTHOGONALITY')
    rng = np.random.default_rng(17)

    for _ in range(1000):
        length = int(rng.integers(2, 40))
        roots = [r for r in range(1, length) if gcd(r, length) == 1]
        root = int(rng.choice(roots))
        a, b = rng.choice(length, size=2, replace=False)

        x = zadoff_chu(length, root, int(a))
        y = zadoff_chu(length, root, int(b))

        assert np.allclose(np.abs(x), 1.)
        assert abs(np.vdot(y, x)) < 1e-9 * length


def test_zadoff_chu_rejects_bad_parameters():
    with pytest.raises(ValueError):
        zadoff_chu(15, 3)
    with pytest.raises(ValueError):
        zadoff_chu(15, 2, shift=15)
    with pytest.raises(ValueError):
        build_pilot_matrix(k_users=6, p=5)


def test_pilot_matrix_gram_is_diagonal():
    pilots = build_pilot_matrix(10, 15, root=1)

    assert pilots.shape == (10, 15)
    assert np.allclose(pilots @ pilots.conj().T, 15. * np.eye(10))


def test_qam_constellation_answer():
    logging.info('TESTING GRAY CODED 16-QAM')
    constellation = qam_constellation(16)

    assert constellation.order == 16
    assert constellation.bits_per_symbol == 4
    assert abs(np.mean(np.abs(constellation.points) ** 2) - 1.) < 1e-12
    assert len(np.unique(np.round(constellation.points, 12))) == 16
    assert sorted(constellation.labels) == list(range(16))
    assert constellation.min_distance == pytest.approx(2. / np.sqrt(10.))

    # nearest neighbours differ in exactly one bit
    points = constellation.points
    for i in range(16):
        for j in range(16):
            if i != j and np.isclose(abs(points[i] - points[j]), constellation.min_distance):
                assert bin(constellation.labels[i] ^ constellation.labels[j]).count('1') == 1


def test_qam_constellation_rejects_non_square_orders():
    for order in (2, 8, 12, 32):
        with pytest.raises(ValueError):
            qam_constellation(order)

    assert qam_constellation(64).order == 64


def test_map_symbols_draws_constellation_points():
    constellation = qam_constellation(16)
    x = map_symbols(np.random.default_rng(0), constellation, 3, 100)

    assert x.shape == (3, 100)
    assert np.all(np.isin(x, constellation.points))


def test_noise_calibration_hits_target_snr():
    logging.info('TESTING NOISE CALIBRATION')
    rng = np.random.default_rng(2024)
    clean = rng.normal(size=(1000, 1000)) + 1j * rng.normal(size=(1000, 1000))

    for target in (-10., 0., 20.):
        sigma2 = calibrate_sigma2(target, clean)
        noise = awgn(rng, clean.shape, sigma2)

        measured = 10. * np.log10(np.mean(np.abs(clean) ** 2) / np.mean(np.abs(noise) ** 2))
        assert abs(measured - target) < 0.1
        assert empirical_snr(clean, sigma2) == pytest.approx(target)


def test_noise_calibration_edge_cases():
    assert calibrate_sigma2(np.inf, np.ones((2, 2))) == 0.
    assert np.all(awgn(np.random.default_rng(0), (3, 4), 0.) == 0.)

    with pytest.raises(ValueError):
        calibrate_sigma2(10., np.zeros((2, 2)))


def test_synthesize_rx_adds_calibrated_noise():
    rng = np.random.default_rng(4)
    h = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
    x = np.ones((2, 5), dtype=np.complex128)
    steering = rng.normal(size=(2, 8)) + 0j

    noisy, clean = synthesize_rx(h, x, steering, 0., rng)

    assert noisy.shape == (5, 8)
    assert np.allclose(clean, (h * x).T @ steering)
    assert np.all(noisy == clean)


def test_build_frame_answer():
    logging.info('TESTING FRAME SYNTHESIS')
    rng = np.random.default_rng(6)
    state = sample_scenario(rng, small_config)
    timing = small_config.timing()
    layout = small_config.layout()
    constellation = small_config.constellation()

    frame = build_frame(state, timing, layout, np.inf, rng, constellation)

    assert frame.pilots.shape == (3, 5)
    assert frame.data.shape == (3, 20)
    assert frame.rx_pilot.shape == (5, 16)
    assert frame.rx_data.shape == (20, 16)
    assert frame.sigma2 == 0.
    assert np.allclose(np.abs(frame.pilots), 1.)
    assert np.all(np.isin(frame.data, constellation.points))
    assert np.all(frame.rx_data == frame.rx_data_clean)
    assert frame.data_block(2).shape == (3, 5)
    assert frame.rx_data_block(2).shape == (5, 16)

    h = reference_channel(state, timing, layout.block_symbols(3))
    expected = (h * frame.data_block(3)).T @ state.steering
    assert np.linalg.norm(frame.rx_data_block(3) - expected) < 1e-10 * np.linalg.norm(expected)

    noisy = build_frame(state, timing, layout, 10., np.random.default_rng(7), constellation)
    clean = np.vstack([noisy.rx_pilot_clean, noisy.rx_data_clean])
    assert empirical_snr(clean, noisy.sigma2) == pytest.approx(10.)
