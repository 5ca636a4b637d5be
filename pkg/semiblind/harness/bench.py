import timeit

from twisted.logger import Logger

from ..estimators import ChannelEstimate, average_and_tile, ddsb_estimate, detect, mddsb_run, pls_estimate, zf_equalize
from ..numerics import right_pinv
from .app import StageChain
from .campaign import trial_rng
from .stages import BuildFrame, InvertSteering, PrepareLink, SampleScenario


__all__ = ['KERNELS', 'bench_kernels']


logger = Logger()


KERNELS = (
    ('right_pinv', 'K^2 M'),
    ('P-LS', 'P M K + P K'),
    ('ZF + detection', 'D M K + D K'),
    ('DD-SB', '(P + D) M K + (P + D) K'),
    ('MDD-SB iteration', 'D M K + D K'),
)


def bench_kernels(cfg, number=100, snr_db=10.):
    """
    Mean wall time per call of the estimator kernels for the dimensions of cfg, measured on
    one single-block frame.
    :type cfg: SystemConfig
    :type number: int calls per kernel
    :return: list of (kernel, operation count, seconds per call)
    """
    data = StageChain([PrepareLink(1), SampleScenario(), InvertSteering(), BuildFrame()])({
        'config': cfg,
        'rng': trial_rng(cfg.master_seed, 'bench', snr_db, 0),
        'snr_db': float(snr_db),
    })

    state = data['state']
    frame = data['frame']
    layout = data['layout']
    constellation = data['constellation']
    steering_pinv = data['steering_pinv']

    pls = average_and_tile(pls_estimate(frame.rx_pilot, frame.pilots, steering_pinv), layout.d)
    initial = ChannelEstimate(values=pls, window=layout.pilot_symbols(), method='P-LS')
    hard = detect(zf_equalize(frame.rx_data_block(1), steering_pinv, pls), constellation).hard

    calls = {
        'right_pinv': lambda: right_pinv(state.steering, cfg.pinv_tol),
        'P-LS': lambda: pls_estimate(frame.rx_pilot, frame.pilots, steering_pinv),
        'ZF + detection': lambda: detect(zf_equalize(frame.rx_data_block(1), steering_pinv, pls), constellation),
        'DD-SB': lambda: ddsb_estimate(frame.rx_pilot, frame.rx_data_block(1), frame.pilots, hard, steering_pinv),
        'MDD-SB iteration': lambda: mddsb_run(frame, initial, steering_pinv, layout, constellation),
    }

    rows = []
    for name, operations in KERNELS:
        seconds = timeit.Timer(calls[name]).timeit(number=number) / number
        logger.debug('{kernel}: {seconds} s per call', kernel=name, seconds=seconds)
        rows.append((name, operations, seconds))

    return rows
