from dataclasses import dataclass
from math import gcd

import numpy as np

from ..channel import reference_channel
from ..numerics import hadamard_mul, matmul
from .constellation import map_symbols


__all__ = [
    'FrameSignals',
    'zadoff_chu',
    'build_pilot_matrix',
    'noiseless_rx',
    'awgn',
    'synthesize_rx',
    'calibrate_sigma2',
    'build_frame',
]


@dataclass(frozen=True, eq=False)
class FrameSignals:
    """
    Everything observed and transmitted in one frame. Transmit matrices are K x symbols,
    receive matrices are symbols x M; data matrices concatenate all data blocks.
    """
    pilots: np.ndarray
    data: np.ndarray
    rx_pilot: np.ndarray
    rx_data: np.ndarray
    rx_pilot_clean: np.ndarray
    rx_data_clean: np.ndarray
    sigma2: float
    layout: object

    def data_block(self, block):
        return self.data[:, self.layout.data_columns(block)]

    def rx_data_block(self, block):
        return self.rx_data[self.layout.data_columns(block), :]


def zadoff_chu(length, root, shift=0):
    """
    Cyclically shifted Zadoff-Chu sequence. Odd lengths use m(m+1), even lengths m^2 in the
    exponent, with m = (n + shift) mod length.
    """
    if length < 1:
        raise ValueError('Zadoff-Chu length must be positive')
    if gcd(root, length) != 1:
        raise ValueError('Zadoff-Chu root {} is not coprime with length {}'.format(root, length))
    if not 0 <= shift < length:
        raise ValueError('Zadoff-Chu shift {} outside [0, {})'.format(shift, length))

    m = (np.arange(length) + shift) % length
    if length % 2:
        exponent = m * (m + 1)
    else:
        exponent = m * m

    return np.exp(-1j * np.pi * root * exponent / length)


def build_pilot_matrix(k_users, p, root=1):
    """
    K x P pilot matrix, row k is the root sequence cyclically shifted by k.
    """
    if p < k_users:
        raise ValueError('{} pilot symbols cannot give {} orthogonal cyclic shifts'.format(p, k_users))

    return np.vstack([zadoff_chu(p, root, k) for k in range(k_users)])


def noiseless_rx(h_eff, x, steering):
    """
    (H_eff . X)^T A, the S x M received matrix without noise.
    """
    return matmul(hadamard_mul(h_eff, x).T, steering)


def awgn(rng, shape, sigma2):
    """
    Circular complex Gaussian noise with per-entry variance sigma2.
    """
    if sigma2 == 0:
        return np.zeros(shape, dtype=np.complex128)
    return np.sqrt(sigma2 / 2.) * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def synthesize_rx(h_eff, x, steering, sigma2, rng):
    """
    :return: tuple (noisy, noiseless), both S x M
    """
    clean = noiseless_rx(h_eff, x, steering)
    return clean + awgn(rng, clean.shape, sigma2), clean


def calibrate_sigma2(target_snr_db, noiseless):
    """
    Noise variance giving target_snr_db between the mean per-entry signal energy and sigma2.
    An infinite target yields sigma2 = 0.
    """
    energy = np.mean(np.abs(noiseless) ** 2)
    if energy == 0:
        raise ValueError('cannot calibrate noise against an all-zero signal')

    if np.isposinf(target_snr_db):
        return 0.

    return float(energy / 10. ** (target_snr_db / 10.))


def build_frame(state, timing, layout, snr_db, rng, constellation, zc_root=1):
    """
    Builds one uplink frame: ZC pilots in block 0, random data in blocks 1..N, the effective
    channel evaluated at every symbol, and noise calibrated on the whole noiseless frame.
    :type state: ChannelState
    :type timing: FrameTiming
    :type layout: FrameLayout
    :type snr_db: float (inf for a noiseless frame)
    :return: FrameSignals
    """
    k_users = state.k_users

    pilots = build_pilot_matrix(k_users, layout.p, zc_root)
    data = map_symbols(rng, constellation, k_users, layout.data_symbols)

    x = np.hstack([pilots, data])
    h_eff = reference_channel(state, timing, range(layout.total_symbols))

    clean = noiseless_rx(h_eff, x, state.steering)
    sigma2 = calibrate_sigma2(snr_db, clean)
    noisy = clean + awgn(rng, clean.shape, sigma2)

    return FrameSignals(
        pilots=pilots,
        data=data,
        rx_pilot=noisy[:layout.p],
        rx_data=noisy[layout.p:],
        rx_pilot_clean=clean[:layout.p],
        rx_data_clean=clean[layout.p:],
        sigma2=sigma2,
        layout=layout,
    )
