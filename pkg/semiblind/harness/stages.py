from ..airlink import build_frame
from ..channel import reference_channel, sample_scenario
from ..estimators import (
    ChannelEstimate,
    average_and_tile,
    ddsb_estimate,
    detect,
    detect_with_estimate,
    genie_detect,
    mddsb_run,
    pbound_estimate,
    pls_estimate,
    zf_equalize,
)
from ..metrics import nmse, ser
from ..numerics import right_pinv
from .app import StageChain, TrialApp


__all__ = [
    'PrepareLink',
    'SampleScenario',
    'InvertSteering',
    'BuildFrame',
    'PilotLeastSquares',
    'DecisionDirectedSemiBlind',
    'ModifiedSemiBlind',
    'PilotBound',
    'GenieAided',
    'ChannelErrorMetrics',
    'SymbolErrorMetrics',
    'build_experiment',
]

'''
Stages of a trial. Each stage reads and writes fields of the trial data dictionary and returns it,
so that stages can be chained. Channel estimates are collected in data['estimates'], channel
evaluations (method, block, symbols, estimate) in data['evaluations'] and block detections
(method, block, DetectionResult) in data['detections'].
'''


class PrepareLink(object):
    def __init__(self, n_blocks=None):
        '''
        PrepareLink derives the link description (timing, layout, constellation) from the config
        :param n_blocks: number of data blocks to simulate, all configured blocks when None
        '''
        super(PrepareLink, self).__init__()
        self.n_blocks = n_blocks

    def __call__(self, data):
        cfg = data['config']

        data['timing'] = cfg.timing()
        data['layout'] = cfg.layout(self.n_blocks)
        data['constellation'] = cfg.constellation()
        data['estimates'] = {}
        data['evaluations'] = []
        data['detections'] = []

        return data


class SampleScenario(object):
    def __init__(self, field='state'):
        super(SampleScenario, self).__init__()
        self.field = field

    def __call__(self, data):
        data[self.field] = sample_scenario(data['rng'], data['config'])

        return data


class InvertSteering(object):
    def __init__(self, state_field='state', field='steering_pinv'):
        '''
        InvertSteering computes the right pseudo-inverse of the steering matrix once per scenario
        :param state_field: field holding the ChannelState
        :param field: field receiving A^+
        '''
        super(InvertSteering, self).__init__()
        self.state_field = state_field
        self.field = field

    def __call__(self, data):
        data[self.field] = right_pinv(data[self.state_field].steering, data['config'].pinv_tol)

        return data


class BuildFrame(object):
    def __init__(self, field='frame'):
        super(BuildFrame, self).__init__()
        self.field = field

    def __call__(self, data):
        cfg = data['config']
        data[self.field] = build_frame(
            data['state'],
            data['timing'],
            data['layout'],
            data['snr_db'],
            data['rng'],
            data['constellation'],
            zc_root=cfg.zc_root,
        )

        return data


class PilotLeastSquares(object):
    method = 'P-LS'

    def __init__(self, evaluate=True):
        '''
        PilotLeastSquares estimates the channel from the pilot block and tiles the mean over D symbols
        :param evaluate: schedule an NMSE evaluation over the pilot symbols (block 0)
        '''
        super(PilotLeastSquares, self).__init__()
        self.evaluate = evaluate

    def __call__(self, data):
        frame = data['frame']
        layout = data['layout']

        raw = pls_estimate(frame.rx_pilot, frame.pilots, data['steering_pinv'])
        estimate = ChannelEstimate(
            values=average_and_tile(raw, layout.d),
            window=layout.pilot_symbols(),
            method=self.method,
        )
        data['estimates'][self.method] = estimate

        if self.evaluate:
            data['evaluations'].append((self.method, 0, layout.pilot_symbols(), estimate.values))

        return data


class DecisionDirectedSemiBlind(object):
    method = 'DD-SB'

    def __call__(self, data):
        frame = data['frame']
        layout = data['layout']
        steering_pinv = data['steering_pinv']

        # block 1 is detected with the P-LS tile, then pilots and decisions are fitted jointly
        soft = zf_equalize(frame.rx_data_block(1), steering_pinv, data['estimates']['P-LS'].values)
        detection = detect(soft, data['constellation'], truth=frame.data_block(1))

        raw = ddsb_estimate(frame.rx_pilot, frame.rx_data_block(1), frame.pilots, detection.hard, steering_pinv)
        window = range(0, layout.p + layout.d)
        estimate = ChannelEstimate(values=average_and_tile(raw, len(window)), window=window, method=self.method)

        data['estimates'][self.method] = estimate
        data['evaluations'].append((self.method, 1, window, estimate.values))

        return data


class ModifiedSemiBlind(object):
    def __init__(self, method='MDD-SB', known_data=False, nmse_blocks=None, ser_blocks=()):
        '''
        ModifiedSemiBlind runs the block-wise MDD-SB tracker from the P-LS estimate
        :param method: label of the produced estimates
        :param known_data: fit against the transmitted data (known-data benchmark)
        :param nmse_blocks: blocks whose estimate is evaluated, the scheduled blocks when None
        :param ser_blocks: blocks whose detection is scored
        '''
        super(ModifiedSemiBlind, self).__init__()
        self.method = method
        self.known_data = known_data
        self.nmse_blocks = nmse_blocks
        self.ser_blocks = ser_blocks

    def __call__(self, data):
        layout = data['layout']

        outcomes = mddsb_run(
            data['frame'],
            data['estimates']['P-LS'],
            data['steering_pinv'],
            layout,
            data['constellation'],
            known_data=self.known_data,
            history_blocks=data['config'].mddsb_history_blocks,
            method=self.method,
        )

        nmse_blocks = self.nmse_blocks
        if nmse_blocks is None:
            nmse_blocks = layout.scheduled_blocks()

        for block in nmse_blocks:
            outcome = outcomes[block - 1]
            data['evaluations'].append((self.method, block, layout.block_symbols(block), outcome.estimate.values))

        for block in self.ser_blocks:
            data['detections'].append((self.method, block, outcomes[block - 1].detection))

        return data


class PilotBound(object):
    method = 'P-bound'

    def __init__(self, nmse_blocks=None, ser_blocks=()):
        super(PilotBound, self).__init__()
        self.nmse_blocks = nmse_blocks
        self.ser_blocks = ser_blocks

    def __call__(self, data):
        layout = data['layout']
        frame = data['frame']

        estimate = pbound_estimate(data['state'], data['timing'], layout)
        data['estimates'][self.method] = estimate

        nmse_blocks = self.nmse_blocks
        if nmse_blocks is None:
            nmse_blocks = layout.scheduled_blocks()

        for block in nmse_blocks:
            data['evaluations'].append((self.method, block, layout.block_symbols(block), estimate.values))

        for block in self.ser_blocks:
            detection = detect_with_estimate(frame, block, estimate.values, data['steering_pinv'], data['constellation'])
            data['detections'].append((self.method, block, detection))

        return data


class GenieAided(object):
    method = 'GA'

    def __init__(self, ser_blocks):
        super(GenieAided, self).__init__()
        self.ser_blocks = ser_blocks

    def __call__(self, data):
        for block in self.ser_blocks:
            detection = genie_detect(
                data['frame'],
                data['state'],
                data['timing'],
                data['steering_pinv'],
                data['constellation'],
                block,
            )
            data['detections'].append((self.method, block, detection))

        return data


class ChannelErrorMetrics(object):
    def __init__(self, field='nmse'):
        super(ChannelErrorMetrics, self).__init__()
        self.field = field

    def __call__(self, data):
        rows = []
        for method, block, symbols, values in data['evaluations']:
            reference = reference_channel(data['state'], data['timing'], symbols)
            rows.append((method, block, nmse(reference, average_and_tile(values, len(symbols)))))

        data[self.field] = rows

        return data


class SymbolErrorMetrics(object):
    def __init__(self, field='ser'):
        super(SymbolErrorMetrics, self).__init__()
        self.field = field

    def __call__(self, data):
        frame = data['frame']

        rows = []
        for method, block, detection in data['detections']:
            rows.append((method, block, ser(frame.data_block(block), detection.hard)))

        data[self.field] = rows

        return data


def build_experiment(experiment, cfg):
    """
    Assembles the TrialApp of an experiment.
    :type experiment: str one of fig2, fig3, fig4
    :type cfg: SystemConfig
    :return: TrialApp
    """
    if experiment == 'fig2':
        n_blocks = 1
        inference = [PilotLeastSquares(), DecisionDirectedSemiBlind()]
    elif experiment == 'fig3':
        n_blocks = cfg.n_blocks
        inference = [
            PilotLeastSquares(),
            PilotBound(),
            ModifiedSemiBlind(),
            ModifiedSemiBlind(method='MDD-SB-KD', known_data=True),
        ]
    elif experiment == 'fig4':
        blocks = tuple(cfg.fig4_blocks)
        n_blocks = max(blocks)
        inference = [
            PilotLeastSquares(evaluate=False),
            PilotBound(nmse_blocks=(), ser_blocks=blocks),
            ModifiedSemiBlind(nmse_blocks=(), ser_blocks=blocks),
            GenieAided(ser_blocks=blocks),
        ]
    else:
        raise ValueError('unknown experiment {!r}'.format(experiment))

    return TrialApp(
        preprocess_fun=StageChain([PrepareLink(n_blocks), SampleScenario(), InvertSteering(), BuildFrame()]),
        inference_fun=StageChain(inference),
        postprocess_fun=StageChain([ChannelErrorMetrics(), SymbolErrorMetrics()]),
    )
