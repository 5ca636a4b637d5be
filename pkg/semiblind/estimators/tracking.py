from dataclasses import dataclass

import numpy as np

from twisted.logger import Logger

from ..channel import reference_channel
from ..errors import DegenerateDivisorError, EstimationError
from ..numerics import hadamard_div
from .least_squares import ChannelEstimate, DetectionResult, average_and_tile, detect, spatial_separate, zf_equalize


__all__ = [
    'BlockOutcome',
    'mddsb_run',
    'pbound_estimate',
    'detect_with_estimate',
    'genie_detect',
]


logger = Logger()


@dataclass(frozen=True, eq=False)
class BlockOutcome:
    """
    Result of processing one data block: the estimate in force after the block, the detection
    of the block, and whether the estimate was refreshed on it.
    """
    block: int
    estimate: ChannelEstimate
    detection: DetectionResult
    updated: bool


def mddsb_run(frame, initial, steering_pinv, layout, constellation,
              known_data=False, history_blocks=1, schedule=None, method='MDD-SB'):
    """
    Modified decision-directed semi-blind tracking over the data blocks of a frame.

    Every block is equalized and detected with the current estimate. On scheduled blocks the
    estimate is replaced by the least-squares fit to the block's own detections, averaged and
    tiled over D symbols. history_blocks > 1 widens the fit to that many most recent data blocks.

    :type frame: FrameSignals
    :type initial: ChannelEstimate tiled to width D, normally the P-LS estimate
    :type known_data: bool fit against the transmitted data instead of detections (benchmark)
    :type schedule: iterable of blocks overriding layout.scheduled_blocks()
    :return: list of BlockOutcome, one per data block
    """
    if initial.width != layout.d:
        raise ValueError('initial estimate spans {} columns, expected D = {}'.format(initial.width, layout.d))
    if history_blocks < 1:
        raise ValueError('history_blocks must be at least 1')

    if schedule is None:
        schedule = layout.scheduled_blocks()
    schedule = set(schedule)

    current = initial
    decisions = {}
    outcomes = []

    for block in range(1, layout.n_blocks + 1):
        truth = frame.data_block(block)
        try:
            soft = zf_equalize(frame.rx_data_block(block), steering_pinv, current.values)
            detection = detect(soft, constellation, truth=truth)
            decisions[block] = truth if known_data else detection.hard

            updated = block in schedule
            if updated:
                window = range(max(1, block - history_blocks + 1), block + 1)
                rx = np.vstack([frame.rx_data_block(b) for b in window])
                x = np.hstack([decisions[b] for b in window])

                raw = hadamard_div(spatial_separate(rx, steering_pinv), x)
                current = ChannelEstimate(
                    values=average_and_tile(raw, layout.d),
                    window=layout.block_symbols(block),
                    method=method,
                )
        except DegenerateDivisorError as e:
            logger.error('{method} aborted at block {block}: {error}', method=method, block=block, error=e)
            raise EstimationError('{} aborted at block {}: {}'.format(method, block, e), block=block)

        outcomes.append(BlockOutcome(block=block, estimate=current, detection=detection, updated=updated))

    return outcomes


def pbound_estimate(state, timing, layout):
    """
    Perfect knowledge of the effective channel during the pilot block, averaged over the P
    pilot symbols and tiled to D. It is never refreshed afterwards.
    """
    pilot_symbols = layout.pilot_symbols()
    truth = reference_channel(state, timing, pilot_symbols)

    return ChannelEstimate(values=average_and_tile(truth, layout.d), window=pilot_symbols, method='P-bound')


def detect_with_estimate(frame, block, estimate, steering_pinv, constellation):
    """
    ZF + minimum distance detection of one data block with a K x D channel matrix.
    """
    soft = zf_equalize(frame.rx_data_block(block), steering_pinv, estimate)
    return detect(soft, constellation, truth=frame.data_block(block))


def genie_detect(frame, state, timing, steering_pinv, constellation, block):
    """
    Detection of one block with the exact per-symbol effective channel.
    """
    truth = reference_channel(state, timing, frame.layout.block_symbols(block))
    return detect_with_estimate(frame, block, truth, steering_pinv, constellation)
