import json
from dataclasses import dataclass, field, fields, replace
from math import gcd

from ..airlink import FrameLayout, FrameTiming, qam_constellation
from ..channel import ArrayConfig
from ..errors import ConfigError


__all__ = [
    'EXPERIMENTS',
    'SystemConfig',
    'parse_config',
    'dump_config',
    'validate_config',
    'with_overrides',
]


EXPERIMENTS = ('fig2', 'fig3', 'fig4')


def _grid(start, stop, step):
    return tuple(float(v) for v in range(start, stop + step, step))


@dataclass(frozen=True)
class SystemConfig:
    """
    Every scenario constant of a campaign. Defaults reproduce the reference LEO scenario:
    10 x 10 UPA at 600 km, 10 users at 30 GHz, 16-QAM, kappa = 10 dB, up to 4 NLoS paths,
    |nu_sat| <= 788 kHz, |nu_ut| <= 200 Hz, P = D = 15, N = 50, MDD-SB every 5 blocks.
    The 960 kHz subcarrier spacing sets the channel aging per block: about 0.11 rad of UT
    Doppler phase per 5 blocks at the 200 Hz bound.
    """
    m_x: int = 10
    m_y: int = 10
    k_users: int = 10
    fc_ghz: float = 30.
    altitude_m: float = 600e3
    rician_kappa_db: float = 10.
    max_paths: int = 4
    random_path_count: bool = False
    sat_doppler_bound_hz: float = 788e3
    ut_doppler_bound_hz: float = 200.
    mp_delay_max_s: float = 100e-9
    n_sc: int = 4096
    n_cp: int = 288
    scs_hz: float = 960e3
    subcarrier: int = 0
    pilots: int = 15
    data_symbols: int = 15
    n_blocks: int = 50
    update_interval: int = 5
    constellation_order: int = 16
    snr_grid_db: tuple = field(default=_grid(-10, 30, 5), metadata={'item': float})
    fig3_snr_grid_db: tuple = field(default=(10.,), metadata={'item': float})
    fig4_blocks: tuple = field(default=(5, 10, 15, 20), metadata={'item': int})
    trials: int = 2000
    master_seed: int = 1
    normalized_pathloss: bool = False
    output_path: str = 'results.csv'
    min_elevation_deg: float = 30.
    guard_distance: float = 0.05
    max_resamples: int = 100
    max_steering_condition: float = 1e6
    zc_root: int = 1
    pinv_tol: float = 1e-9
    mddsb_history_blocks: int = 1
    workers: int = 1
    max_skip_fraction: float = 0.01
    ledger_path: str = ''

    def array(self):
        return ArrayConfig(m_x=self.m_x, m_y=self.m_y)

    def timing(self):
        return FrameTiming.from_spacing(self.scs_hz, self.n_sc, self.n_cp, self.subcarrier)

    def layout(self, n_blocks=None):
        """
        Frame layout, optionally shortened to n_blocks data blocks.
        """
        if n_blocks is None:
            n_blocks = self.n_blocks
        return FrameLayout(
            p=self.pilots,
            d=self.data_symbols,
            n_blocks=n_blocks,
            update_interval=min(self.update_interval, n_blocks),
        )

    def constellation(self):
        return qam_constellation(self.constellation_order)

    def snr_grid(self, experiment):
        if experiment == 'fig3':
            return self.fig3_snr_grid_db
        return self.snr_grid_db


_FIELDS = {f.name: f for f in fields(SystemConfig)}

_POSITIVE_COUNTS = (
    'm_x', 'm_y', 'k_users', 'max_paths', 'n_sc', 'pilots', 'data_symbols', 'n_blocks', 'update_interval',
    'trials', 'max_resamples', 'mddsb_history_blocks', 'workers', 'zc_root',
)
_NONNEGATIVE = ('sat_doppler_bound_hz', 'ut_doppler_bound_hz', 'mp_delay_max_s', 'n_cp', 'subcarrier', 'guard_distance')
_POSITIVE = ('fc_ghz', 'altitude_m', 'scs_hz', 'max_steering_condition', 'pinv_tol')


def _coerce(key, value, location):
    definition = _FIELDS[key]

    def fail(expected):
        raise ConfigError('expected {}, got {!r}'.format(expected, value), key=key, location=location)

    def scalar(kind, item):
        if kind is bool:
            if not isinstance(item, bool):
                fail('a boolean')
            return item
        if kind is int:
            if isinstance(item, bool) or not isinstance(item, int):
                fail('an integer')
            return item
        if kind is float:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                fail('a number')
            return float(item)
        if not isinstance(item, str):
            fail('a string')
        return item

    if definition.type is tuple:
        if not isinstance(value, (list, tuple)):
            fail('a list')
        return tuple(scalar(definition.metadata['item'], item) for item in value)

    return scalar(definition.type, value)


def validate_config(cfg, locations=None):
    """
    Range and consistency checks. Raises ConfigError naming the offending key.
    :type cfg: SystemConfig
    :type locations: dict key -> location string used in error messages
    """
    locations = locations or {}

    def check(condition, key, message):
        if not condition:
            raise ConfigError(message, key=key, location=locations.get(key))

    for key in _POSITIVE_COUNTS:
        check(getattr(cfg, key) >= 1, key, 'must be at least 1')
    for key in _NONNEGATIVE:
        check(getattr(cfg, key) >= 0, key, 'must be non-negative')
    for key in _POSITIVE:
        check(getattr(cfg, key) > 0, key, 'must be positive')

    check(cfg.subcarrier < cfg.n_sc, 'subcarrier', 'must be below n_sc = {}'.format(cfg.n_sc))
    check(cfg.update_interval <= cfg.n_blocks, 'update_interval', 'must not exceed n_blocks = {}'.format(cfg.n_blocks))
    check(cfg.pilots >= cfg.k_users, 'pilots', 'must be at least k_users = {} for orthogonal pilots'.format(cfg.k_users))
    check(gcd(cfg.zc_root, cfg.pilots) == 1, 'zc_root', 'must be coprime with pilots = {}'.format(cfg.pilots))
    check(0. <= cfg.min_elevation_deg < 90., 'min_elevation_deg', 'must lie in [0, 90)')
    check(cfg.pinv_tol < 1., 'pinv_tol', 'must be below 1')
    check(cfg.max_steering_condition > 1., 'max_steering_condition', 'must exceed 1')
    check(0. <= cfg.max_skip_fraction <= 1., 'max_skip_fraction', 'must lie in [0, 1]')
    check(len(cfg.snr_grid_db) > 0, 'snr_grid_db', 'must not be empty')
    check(len(cfg.fig3_snr_grid_db) > 0, 'fig3_snr_grid_db', 'must not be empty')
    check(len(cfg.fig4_blocks) > 0, 'fig4_blocks', 'must not be empty')
    check(all(1 <= b <= cfg.n_blocks for b in cfg.fig4_blocks), 'fig4_blocks',
          'blocks must lie in [1, n_blocks = {}]'.format(cfg.n_blocks))

    try:
        qam_constellation(cfg.constellation_order)
    except ValueError as e:
        check(False, 'constellation_order', str(e))

    return cfg


def _strip_comment(line):
    # '#' starts a comment only outside a double quoted JSON string
    quoted = False
    escaped = False
    for position, char in enumerate(line):
        if escaped:
            escaped = False
        elif char == '\\':
            escaped = quoted
        elif char == '"':
            quoted = not quoted
        elif char == '#' and not quoted:
            return line[:position]
    return line


def _read_text(path, text):
    values = {}
    locations = {}
    for number, line in enumerate(text.splitlines(), start=1):
        location = '{}:{}'.format(path, number)
        content = _strip_comment(line).strip()
        if not content:
            continue
        if '=' not in content:
            raise ConfigError('expected "key = value", got {!r}'.format(line.strip()), location=location)

        key, raw = (part.strip() for part in content.split('=', 1))
        if key in values:
            raise ConfigError('duplicate key', key=key, location=location)
        try:
            value = json.loads(raw)
        except ValueError:
            value = raw

        values[key] = value
        locations[key] = location
    return values, locations


def _read_json(path, text):
    try:
        values = json.loads(text)
    except ValueError as e:
        raise ConfigError('malformed JSON: {}'.format(e), location=path)
    if not isinstance(values, dict):
        raise ConfigError('top level must be a JSON object', location=path)
    return values, {key: path for key in values}


def parse_config(path):
    """
    Reads a flat configuration file. Missing keys take the defaults, unknown keys are rejected.
    Files ending in .json hold a flat JSON object, anything else is "key = value" text with
    '#' comments and JSON-literal values.
    :type path: str
    :return: SystemConfig
    """
    try:
        with open(path) as f:
            text = f.read()
    except (IOError, OSError) as e:
        raise ConfigError('cannot read configuration: {}'.format(e), location=str(path))

    if str(path).endswith('.json'):
        values, locations = _read_json(path, text)
    else:
        values, locations = _read_text(path, text)

    kwargs = {}
    for key, value in values.items():
        if key not in _FIELDS:
            raise ConfigError('unknown key', key=key, location=locations[key])
        kwargs[key] = _coerce(key, value, locations[key])

    return validate_config(SystemConfig(**kwargs), locations)


def dump_config(cfg):
    """
    Text form of cfg that parse_config reads back to an identical SystemConfig.
    """
    lines = ['# semiblind configuration']
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            value = list(value)
        lines.append('{} = {}'.format(f.name, json.dumps(value)))
    return '\n'.join(lines) + '\n'


def with_overrides(cfg, **overrides):
    """
    Copy of cfg with the given non-None overrides applied and validated.
    """
    overrides = {key: value for key, value in overrides.items() if value is not None}
    for key, value in overrides.items():
        if key not in _FIELDS:
            raise ConfigError('unknown key', key=key)
        overrides[key] = _coerce(key, value, 'command line')
    return validate_config(replace(cfg, **overrides), {key: 'command line' for key in overrides})
