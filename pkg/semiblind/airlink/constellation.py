from dataclasses import dataclass

import numpy as np


__all__ = ['Constellation', 'qam_constellation', 'map_symbols']


@dataclass(frozen=True, eq=False)
class Constellation:
    """
    Normalized (unit average energy) constellation with Gray-coded bit labels.
    points[i] carries labels[i]; the point index is also the tie-break order of detection.
    """
    order: int
    points: np.ndarray
    labels: np.ndarray

    @property
    def bits_per_symbol(self):
        return int(np.log2(self.order))

    @property
    def min_distance(self):
        diff = np.abs(self.points[:, np.newaxis] - self.points[np.newaxis, :])
        return float(np.min(diff[~np.eye(self.order, dtype=bool)]))

    def nearest(self, values):
        """
        Index of the closest point for each value; ties go to the lowest index.
        """
        values = np.asarray(values, dtype=np.complex128)
        distances = np.abs(values[..., np.newaxis] - self.points) ** 2
        return np.argmin(distances, axis=-1)


def _gray(n):
    return n ^ (n >> 1)


def qam_constellation(order=16):
    """
    Square M-QAM with per-axis Gray mapping, scaled to unit average energy.
    :type order: int a power of 4
    """
    side = int(round(np.sqrt(order)))
    if order < 4 or side * side != order or side & (side - 1):
        raise ValueError('square QAM needs an order that is a power of 4, got {}'.format(order))

    levels = 2. * np.arange(side) - (side - 1)
    half_bits = int(np.log2(side))

    points = []
    labels = []
    for i in range(side):
        for q in range(side):
            points.append(levels[i] + 1j * levels[q])
            labels.append((_gray(i) << half_bits) | _gray(q))

    points = np.asarray(points) / np.sqrt(2. * (order - 1) / 3.)

    return Constellation(order=order, points=points, labels=np.asarray(labels, dtype=int))


def map_symbols(rng, constellation, k, s):
    """
    K x S matrix of i.i.d. uniform constellation points.
    """
    return constellation.points[rng.integers(0, constellation.order, size=(k, s))]
