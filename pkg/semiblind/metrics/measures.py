from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError


__all__ = ['METHODS', 'MetricRecord', 'nmse', 'ser', 'empirical_snr', 'aggregate']


METHODS = ('P-LS', 'DD-SB', 'MDD-SB', 'MDD-SB-KD', 'P-bound', 'GA')


@dataclass(frozen=True)
class MetricRecord:
    """
    One aggregated output row: a (method, SNR, block) cell averaged over trials.
    """
    method: str
    snr_db: float
    block: Optional[int]
    nmse: Optional[float]
    ser: Optional[float]
    trials: int
    seed: int

    def __post_init__(self):
        if self.nmse is None and self.ser is None:
            raise ValueError('a metric record needs an NMSE or an SER value')
        if self.trials < 1:
            raise ValueError('a metric record needs at least one trial')


def nmse(reference, estimate):
    """
    ||vec(reference) - vec(estimate)||^2 / ||vec(reference)||^2
    """
    reference = np.asarray(reference, dtype=np.complex128)
    estimate = np.asarray(estimate, dtype=np.complex128)

    if reference.shape != estimate.shape:
        raise DimensionMismatchError('nmse', reference.shape, estimate.shape)

    energy = np.sum(np.abs(reference) ** 2)
    if energy == 0:
        raise ValueError('nmse: reference channel is identically zero')

    return float(np.sum(np.abs(reference - estimate) ** 2) / energy)


def ser(truth, detected):
    """
    Fraction of symbols whose detected constellation point differs from the transmitted one.
    """
    truth = np.asarray(truth)
    detected = np.asarray(detected)

    if truth.shape != detected.shape:
        raise DimensionMismatchError('ser', truth.shape, detected.shape)
    if truth.size == 0:
        raise ValueError('ser: no symbols to compare')

    return float(np.count_nonzero(truth != detected) / truth.size)


def empirical_snr(noiseless, sigma2):
    """
    10 log10 of mean per-entry signal energy over the per-entry noise variance.
    """
    if sigma2 <= 0:
        raise ValueError('empirical_snr needs a positive noise variance, got {}'.format(sigma2))

    energy = np.mean(np.abs(np.asarray(noiseless)) ** 2)
    return float(10. * np.log10(energy / sigma2))


def aggregate(values):
    """
    Arithmetic mean of per-trial values, folded in the given (trial index) order.
    """
    total = 0.
    count = 0
    for value in values:
        total += value
        count += 1
    if count == 0:
        return None
    return total / count
