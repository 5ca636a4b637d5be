from dataclasses import dataclass

import numpy as np

from ..numerics import as_complex_matrix, hadamard_div, matmul


__all__ = [
    'ChannelEstimate',
    'DetectionResult',
    'spatial_separate',
    'pls_estimate',
    'average_and_tile',
    'zf_equalize',
    'detect',
    'ddsb_estimate',
]


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """
    K x W estimate valid over the frame symbols in window; method names the producer.
    """
    values: np.ndarray
    window: range
    method: str

    @property
    def width(self):
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class DetectionResult:
    soft: np.ndarray
    hard: np.ndarray
    indices: np.ndarray
    symbol_errors: int = None


def spatial_separate(rx, steering_pinv):
    """
    (Y A^+)^T: per-user streams, K x symbols.
    """
    return matmul(rx, steering_pinv).T


def pls_estimate(rx_pilot, pilots, steering_pinv):
    """
    Pilot least-squares estimate (Y^P A^+)^T / X^P, one column per pilot symbol.
    :type rx_pilot: ndarray P x M
    :type pilots: ndarray K x P
    :type steering_pinv: ndarray M x K
    :return: ndarray K x P
    """
    return hadamard_div(spatial_separate(rx_pilot, steering_pinv), pilots)


def average_and_tile(raw, width):
    """
    Row-wise mean of raw repeated over width columns.
    """
    raw = as_complex_matrix(raw)
    if raw.shape[1] < 1 or width < 1:
        raise ValueError('averaging needs at least one input column and one output column')

    mean = np.mean(raw, axis=1, keepdims=True)
    return np.repeat(mean, width, axis=1)


def zf_equalize(rx_data, steering_pinv, tiled_estimate):
    """
    Zero-forcing soft symbols (Y^D A^+)^T / H, K x D.
    """
    return hadamard_div(spatial_separate(rx_data, steering_pinv), tiled_estimate)


def detect(soft, constellation, truth=None):
    """
    Minimum distance detection of soft symbols. When truth is given the number of symbol
    errors is counted as well.
    :type constellation: Constellation
    :return: DetectionResult
    """
    soft = as_complex_matrix(soft)
    indices = constellation.nearest(soft)
    hard = constellation.points[indices]

    errors = None
    if truth is not None:
        errors = int(np.count_nonzero(hard != np.asarray(truth)))

    return DetectionResult(soft=soft, hard=hard, indices=indices, symbol_errors=errors)


def ddsb_estimate(rx_pilot, rx_data, pilots, detected, steering_pinv):
    """
    Decision-directed semi-blind estimate ([Y^P; Y^D] A^+)^T / [X^P, X^D], K x (P + D).
    The first P columns coincide with pls_estimate.
    """
    rx_pilot = as_complex_matrix(rx_pilot)
    pilots = as_complex_matrix(pilots)

    # empty data blocks keep their column/row count so the stacks stay well formed
    rx_data = np.asarray(rx_data, dtype=np.complex128).reshape(-1, rx_pilot.shape[1])
    detected = np.asarray(detected, dtype=np.complex128).reshape(pilots.shape[0], -1)

    rx = np.vstack([rx_pilot, rx_data])
    x = np.hstack([pilots, detected])

    return hadamard_div(spatial_separate(rx, steering_pinv), x)
