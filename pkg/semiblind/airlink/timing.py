from dataclasses import dataclass


__all__ = ['FrameTiming', 'FrameLayout']


@dataclass(frozen=True)
class FrameTiming:
    """
    OFDM numerology of the uplink: sampling period t_s (seconds), N_sc subcarriers, N_cp cyclic
    prefix samples, and the subcarrier index c on which the link is simulated.
    """
    t_s: float
    n_sc: int
    n_cp: int
    subcarrier: int = 0

    def __post_init__(self):
        if self.t_s <= 0 or self.n_sc < 1 or self.n_cp < 0:
            raise ValueError('invalid numerology t_s={} n_sc={} n_cp={}'.format(self.t_s, self.n_sc, self.n_cp))
        if not 0 <= self.subcarrier < self.n_sc:
            raise ValueError('subcarrier {} outside [0, {})'.format(self.subcarrier, self.n_sc))

    @classmethod
    def from_spacing(cls, scs_hz, n_sc, n_cp, subcarrier=0):
        return cls(t_s=1. / (n_sc * scs_hz), n_sc=n_sc, n_cp=n_cp, subcarrier=subcarrier)

    @property
    def t_sl(self):
        return self.n_sc * self.t_s

    @property
    def t_cp(self):
        return self.n_cp * self.t_s

    @property
    def symbol_period(self):
        return self.t_sl + self.t_cp

    def frequency(self, subcarrier=None):
        if subcarrier is None:
            subcarrier = self.subcarrier
        return subcarrier / self.t_sl

    def timestamps(self, symbols):
        return [s * self.symbol_period for s in symbols]


@dataclass(frozen=True)
class FrameLayout:
    """
    Uplink frame of N+1 blocks: block 0 carries p pilot symbols, blocks 1..n_blocks carry d data
    symbols each. MDD-SB re-estimates on every update_interval-th data block.
    """
    p: int = 15
    d: int = 15
    n_blocks: int = 50
    update_interval: int = 5

    def __post_init__(self):
        if self.p < 1 or self.d < 1 or self.n_blocks < 1:
            raise ValueError('frame layout needs p, d, n_blocks >= 1')
        if not 1 <= self.update_interval <= self.n_blocks:
            raise ValueError('update_interval {} outside [1, {}]'.format(self.update_interval, self.n_blocks))

    @property
    def total_symbols(self):
        return self.p + self.n_blocks * self.d

    @property
    def data_symbols(self):
        return self.n_blocks * self.d

    def pilot_symbols(self):
        return range(0, self.p)

    def block_symbols(self, block):
        """
        Frame symbol indices of a block (0 is the pilot block).
        """
        if block == 0:
            return self.pilot_symbols()
        self._check_block(block)
        start = self.p + (block - 1) * self.d
        return range(start, start + self.d)

    def data_columns(self, block):
        """
        Column slice of a data block inside the concatenated data matrix X^D.
        """
        self._check_block(block)
        return slice((block - 1) * self.d, block * self.d)

    def scheduled_blocks(self):
        return list(range(self.update_interval, self.n_blocks + 1, self.update_interval))

    def is_scheduled(self, block):
        return block % self.update_interval == 0

    def _check_block(self, block):
        if not 1 <= block <= self.n_blocks:
            raise ValueError('data block {} outside [1, {}]'.format(block, self.n_blocks))
