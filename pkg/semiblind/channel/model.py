from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .geometry import ArrayConfig, path_loss_db, sample_geometry


__all__ = [
    'FadingState',
    'ChannelState',
    'sample_fading',
    'sample_scenario',
    'scalar_channel',
    'channel_matrix',
    'reference_channel',
    'doppler_precompensation',
]


@dataclass(frozen=True, eq=False)
class FadingState:
    """
    Small-scale fading of one user: Rician LoS term plus path_count Rayleigh NLoS paths.
    Delays in seconds, Dopplers in Hz, beta_linear is the linear large-scale power gain.
    """
    rician_kappa: float
    path_count: int
    gains: np.ndarray
    tau_los_s: float
    tau_mp_s: np.ndarray
    nu_ut_los_hz: float
    nu_ut_nlos_hz: np.ndarray
    beta_linear: float

    @property
    def tau_nlos_s(self):
        return self.tau_los_s + self.tau_mp_s


@dataclass(frozen=True, eq=False)
class ChannelState:
    geometry: tuple
    fading: tuple
    array: ArrayConfig
    steering: np.ndarray

    @property
    def k_users(self):
        return len(self.geometry)

    @property
    def nu_sat_hz(self):
        return np.asarray([g.nu_sat_hz for g in self.geometry])


def sample_fading(rng, cfg, distance_m):
    """
    Draws the fading state of one user at slant range distance_m.
    :type cfg: SystemConfig
    :return: FadingState
    """
    if cfg.random_path_count:
        path_count = int(rng.integers(1, cfg.max_paths + 1))
    else:
        path_count = int(cfg.max_paths)

    gains = rng.normal(size=path_count) + 1j * rng.normal(size=path_count)
    tau_mp = cfg.mp_delay_max_s * (1. - rng.uniform(size=path_count))
    nu_los = rng.uniform(-cfg.ut_doppler_bound_hz, cfg.ut_doppler_bound_hz)
    nu_nlos = rng.uniform(-cfg.ut_doppler_bound_hz, cfg.ut_doppler_bound_hz, size=path_count)

    if cfg.normalized_pathloss:
        beta = 1.
    else:
        beta = 10. ** (-path_loss_db(cfg.fc_ghz, distance_m) / 10.)

    return FadingState(
        rician_kappa=10. ** (cfg.rician_kappa_db / 10.),
        path_count=path_count,
        gains=gains,
        tau_los_s=distance_m / SPEED_OF_LIGHT,
        tau_mp_s=tau_mp,
        nu_ut_los_hz=float(nu_los),
        nu_ut_nlos_hz=nu_nlos,
        beta_linear=float(beta),
    )


def sample_scenario(rng, cfg):
    """
    Samples a complete scenario: user geometry, steering matrix and per-user fading.
    :type rng: numpy.random.Generator
    :type cfg: SystemConfig
    :return: ChannelState
    """
    geometry, steering = sample_geometry(rng, cfg)
    fading = tuple(sample_fading(rng, cfg, g.distance_m) for g in geometry)

    return ChannelState(geometry=tuple(geometry), fading=fading, array=cfg.array(), steering=steering)


def _user_channel(fading, nu_sat_hz, t, f, include_sat_doppler):
    t = np.atleast_1d(np.asarray(t, dtype=float))

    los = np.sqrt(fading.rician_kappa) * np.exp(2j * np.pi * (t * fading.nu_ut_los_hz - f * fading.tau_los_s))

    phases = np.exp(2j * np.pi * (np.outer(t, fading.nu_ut_nlos_hz) - f * fading.tau_nlos_s[np.newaxis, :]))
    nlos = phases @ fading.gains / np.sqrt(fading.path_count)

    h = np.sqrt(fading.beta_linear / (fading.rician_kappa + 1.)) * (los + nlos)

    if include_sat_doppler:
        h = h * np.exp(2j * np.pi * t * nu_sat_hz)

    return h


def scalar_channel(state, k, t, f, include_sat_doppler=True):
    """
    Complex gain of user k at time t (seconds) and frequency f (Hz).
    """
    return complex(_user_channel(state.fading[k], state.geometry[k].nu_sat_hz, t, f, include_sat_doppler)[0])


def _symbol_times(timing, symbols):
    symbols = np.asarray(list(symbols), dtype=float)
    if symbols.size == 0:
        raise ValueError('symbol range is empty')
    return symbols * timing.symbol_period


def channel_matrix(state, timing, symbols, include_sat_doppler=True, subcarrier=None):
    """
    Per-symbol channel H_c (K x S) on one subcarrier. Entry (k, s) is evaluated at
    t = s (T_sl + T_cp) and f = c / T_sl.
    :type timing: FrameTiming
    :type symbols: iterable of symbol indices
    :type subcarrier: int overrides timing.subcarrier when given
    """
    t = _symbol_times(timing, symbols)
    f = timing.frequency(subcarrier)

    return np.vstack([
        _user_channel(fading, geometry.nu_sat_hz, t, f, include_sat_doppler)
        for geometry, fading in zip(state.geometry, state.fading)
    ])


def reference_channel(state, timing, symbols, subcarrier=None):
    """
    Effective channel after satellite Doppler pre-compensation; the ground truth for NMSE.
    """
    return channel_matrix(state, timing, symbols, include_sat_doppler=False, subcarrier=subcarrier)


def doppler_precompensation(state, timing, symbols):
    """
    exp(-j 2 pi T kron V_sat) as applied by the user terminals, K x S.
    """
    t = _symbol_times(timing, symbols)
    return np.exp(-2j * np.pi * np.outer(state.nu_sat_hz, t))
