class SemiblindError(Exception):
    pass


class NumericsError(SemiblindError, ValueError):
    pass


class DimensionMismatchError(NumericsError):
    def __init__(self, operation, shape_a, shape_b):
        self.operation = operation
        self.shape_a = tuple(shape_a)
        self.shape_b = tuple(shape_b)
        super(DimensionMismatchError, self).__init__(
            '{}: incompatible shapes {} and {}'.format(operation, self.shape_a, self.shape_b)
        )


class DegenerateDivisorError(NumericsError):
    def __init__(self, index, value):
        self.index = tuple(int(i) for i in index)
        self.value = value
        super(DegenerateDivisorError, self).__init__(
            'hadamard_div: divisor {} at entry {} is below the divisor floor'.format(value, self.index)
        )


class RankDeficiencyError(NumericsError):
    def __init__(self, rank, expected):
        self.rank = rank
        self.expected = expected
        super(RankDeficiencyError, self).__init__(
            'right_pinv: effective rank {} is below the required row rank {}'.format(rank, expected)
        )


class ScenarioError(SemiblindError, RuntimeError):
    pass


class EstimationError(SemiblindError, RuntimeError):
    def __init__(self, message, block=None):
        self.block = block
        super(EstimationError, self).__init__(message)


class ConfigError(SemiblindError, ValueError):
    def __init__(self, message, key=None, location=None):
        self.key = key
        self.location = location
        prefix = ''
        if location is not None:
            prefix += '{}: '.format(location)
        if key is not None:
            prefix += '"{}": '.format(key)
        super(ConfigError, self).__init__(prefix + message)


class CampaignError(SemiblindError, RuntimeError):
    pass
