from dataclasses import dataclass

import numpy as np

from twisted.logger import Logger

from ..errors import ScenarioError
from ..numerics import kronecker


__all__ = [
    'EARTH_RADIUS_M',
    'ArrayConfig',
    'UserGeometry',
    'upa_axis_vector',
    'array_response',
    'steering_matrix',
    'path_loss_db',
    'slant_range_m',
    'sample_direction_cosines',
    'sample_geometry',
]


EARTH_RADIUS_M = 6371e3

logger = Logger()


@dataclass(frozen=True)
class ArrayConfig:
    """
    Uniform planar array with half-wavelength spacing along both axes.
    """
    m_x: int = 10
    m_y: int = 10

    def __post_init__(self):
        if self.m_x < 1 or self.m_y < 1:
            raise ValueError('array dimensions must be positive, got {} x {}'.format(self.m_x, self.m_y))

    @property
    def m(self):
        return self.m_x * self.m_y


@dataclass(frozen=True)
class UserGeometry:
    theta_x: float
    theta_y: float
    distance_m: float
    nu_sat_hz: float
    elevation_rad: float

    @property
    def direction_cosines(self):
        return np.sin(self.theta_y) * np.cos(self.theta_x), np.cos(self.theta_y)


def upa_axis_vector(direction, m_d):
    """
    Array vector of one UPA axis: entry i is exp(-j pi i direction) / sqrt(m_d).
    """
    i = np.arange(m_d)
    return np.exp(-1j * np.pi * i * direction) / np.sqrt(m_d)


def array_response(theta_x, theta_y, array):
    """
    UPA response v_x(sin(theta_y) cos(theta_x)) kron v_y(cos(theta_y)), unit norm.
    :type array: ArrayConfig
    """
    v_x = upa_axis_vector(np.sin(theta_y) * np.cos(theta_x), array.m_x)
    v_y = upa_axis_vector(np.cos(theta_y), array.m_y)

    return kronecker(v_x, v_y)


def steering_matrix(geometry, array):
    """
    Stacks the response of every user into the K x M matrix A.
    """
    return np.vstack([array_response(g.theta_x, g.theta_y, array) for g in geometry])


def path_loss_db(fc_ghz, d_m):
    """
    Free-space path loss in dB with the carrier in GHz and the distance in meters.
    """
    if fc_ghz <= 0 or d_m <= 0:
        raise ValueError('path loss needs positive carrier and distance, got {} GHz and {} m'.format(fc_ghz, d_m))

    return 32.45 + 20. * np.log10(fc_ghz) + 20. * np.log10(d_m)


def slant_range_m(elevation_rad, altitude_m, earth_radius_m=EARTH_RADIUS_M):
    s = np.sin(elevation_rad)
    return np.sqrt(earth_radius_m ** 2 * s ** 2 + altitude_m ** 2 + 2. * earth_radius_m * altitude_m) \
        - earth_radius_m * s


def _periodic_distance(a, b):
    # array responses repeat when a direction cosine moves by 2
    delta = np.abs(np.asarray(a) - np.asarray(b)) % 2.
    delta = np.minimum(delta, 2. - delta)
    return np.sqrt(np.sum(delta ** 2, axis=-1))


def sample_direction_cosines(rng):
    """
    Draws (sin(theta_y) cos(theta_x), cos(theta_y)) uniformly over the visible unit disk.
    """
    while True:
        u, v = rng.uniform(-1., 1., size=2)
        if u ** 2 + v ** 2 <= 1.:
            return u, v


def _angles_from_cosines(u, v):
    theta_y = np.arccos(v)
    sin_y = np.sin(theta_y)
    if sin_y <= 0.:
        return 0., theta_y
    return np.arccos(np.clip(u / sin_y, -1., 1.)), theta_y


def _place_users(rng, k_users, guard_distance, max_resamples):
    placed = []
    for k in range(k_users):
        for attempt in range(max_resamples):
            candidate = sample_direction_cosines(rng)
            if not placed or np.min(_periodic_distance(np.asarray(placed), candidate)) >= guard_distance:
                placed.append(candidate)
                break
            logger.debug('user {k}: direction too close to a placed user, resampling', k=k)
        else:
            raise ScenarioError(
                'could not place user {} at guard distance {} after {} attempts'.format(k, guard_distance, max_resamples)
            )
    return placed


def sample_geometry(rng, cfg):
    """
    Samples the geometry of all users and returns (geometries, steering matrix).

    Elevations are uniform in [min_elevation_deg, 90] degrees, slant ranges follow from a spherical
    Earth, satellite Dopplers are uniform within the configured bound. Users are spread over the
    visible direction-cosine disk with a minimum separation, and the whole draw is repeated until
    cond(A A^H) is below cfg.max_steering_condition.

    :type cfg: SystemConfig
    :return: tuple (list of UserGeometry, ndarray K x M)
    """
    array = cfg.array()

    for attempt in range(cfg.max_resamples):
        cosines = _place_users(rng, cfg.k_users, cfg.guard_distance, cfg.max_resamples)

        geometry = []
        for u, v in cosines:
            elevation = np.deg2rad(rng.uniform(cfg.min_elevation_deg, 90.))
            theta_x, theta_y = _angles_from_cosines(u, v)
            geometry.append(UserGeometry(
                theta_x=float(theta_x),
                theta_y=float(theta_y),
                distance_m=float(slant_range_m(elevation, cfg.altitude_m)),
                nu_sat_hz=float(rng.uniform(-cfg.sat_doppler_bound_hz, cfg.sat_doppler_bound_hz)),
                elevation_rad=float(elevation),
            ))

        steering = steering_matrix(geometry, array)
        condition = np.linalg.cond(steering @ steering.conj().T)
        if condition < cfg.max_steering_condition:
            return geometry, steering

        logger.debug('steering condition {condition:.3e} too large, resampling geometry', condition=condition)

    raise ScenarioError('no well-conditioned steering matrix after {} attempts'.format(cfg.max_resamples))
