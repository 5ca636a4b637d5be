import csv
import hashlib
import traceback
from collections import OrderedDict
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from twisted.logger import Logger

from ..errors import CampaignError, EstimationError, NumericsError, ScenarioError
from ..metrics import MetricRecord, aggregate
from .config import EXPERIMENTS
from .ledger import TrialLedger
from .stages import build_experiment


__all__ = [
    'CSV_HEADER',
    'TrialResult',
    'trial_entropy',
    'trial_rng',
    'run_trial',
    'run_campaign',
    'write_csv',
]


CSV_HEADER = ('method', 'snr_db', 'block', 'nmse', 'ser', 'trials', 'seed')

logger = Logger()


@dataclass(frozen=True)
class TrialResult:
    """
    Metrics of one trial. nmse and ser hold (method, block, value) rows; a skipped trial carries
    the diagnostic of the error that stopped it and no rows.
    """
    experiment: str
    snr_db: float
    trial_index: int
    seed: int
    nmse: tuple = ()
    ser: tuple = ()
    elapsed_s: float = 0.
    skipped: bool = False
    diagnostic: str = ''


def trial_entropy(master_seed, experiment, snr_db, trial_index):
    """
    Stable 256-bit entropy of a trial, independent of execution order and worker count.
    """
    key = '{}|{}|{!r}|{}'.format(master_seed, experiment, float(snr_db), trial_index)
    return int(hashlib.sha256(key.encode('utf-8')).hexdigest(), 16)


def trial_rng(master_seed, experiment, snr_db, trial_index):
    entropy = trial_entropy(master_seed, experiment, snr_db, trial_index)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def run_trial(cfg, trial_index, snr_db, experiment):
    """
    Runs one trial of an experiment. The outcome is a pure function of
    (cfg.master_seed, experiment, snr_db, trial_index) and the rest of cfg.
    Scenario, numerical and estimation failures produce a skipped TrialResult.
    :type cfg: SystemConfig
    :return: TrialResult
    """
    seed = trial_entropy(cfg.master_seed, experiment, snr_db, trial_index)
    app = build_experiment(experiment, cfg)

    data = {
        'config': cfg,
        'rng': trial_rng(cfg.master_seed, experiment, snr_db, trial_index),
        'snr_db': float(snr_db),
    }

    try:
        result = app(data)
    except (ScenarioError, NumericsError, EstimationError) as e:
        logger.error(
            'trial {trial} of {experiment} at {snr_db} dB skipped: {error}',
            trial=trial_index, experiment=experiment, snr_db=snr_db, error=e,
        )
        logger.debug('{tb}', tb=traceback.format_exc())
        return TrialResult(
            experiment=experiment,
            snr_db=float(snr_db),
            trial_index=trial_index,
            seed=seed,
            skipped=True,
            diagnostic='{}: {}'.format(type(e).__name__, e),
        )

    return TrialResult(
        experiment=experiment,
        snr_db=float(snr_db),
        trial_index=trial_index,
        seed=seed,
        nmse=tuple(result['nmse']),
        ser=tuple(result['ser']),
        elapsed_s=result['elapsed_s'],
    )


def _trial_job(args):
    return run_trial(*args)


def _run_trials(cfg, experiment, snr_db, workers):
    jobs = [(cfg, trial_index, snr_db, experiment) for trial_index in range(cfg.trials)]

    if workers <= 1:
        return [_trial_job(job) for job in jobs]

    pool = Pool(processes=workers)
    try:
        # imap keeps submission order, so folding below sees trials by index
        results = list(pool.imap(_trial_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    finally:
        pool.close()
        pool.join()

    return sorted(results, key=lambda r: r.trial_index)


def _fold(cfg, snr_db, results):
    cells = OrderedDict()
    for result in results:
        for metric, rows in (('nmse', result.nmse), ('ser', result.ser)):
            for method, block, value in rows:
                cell = cells.setdefault((method, block), {'nmse': [], 'ser': []})
                cell[metric].append(value)

    records = []
    for (method, block), values in cells.items():
        records.append(MetricRecord(
            method=method,
            snr_db=float(snr_db),
            block=block,
            nmse=aggregate(values['nmse']),
            ser=aggregate(values['ser']),
            trials=len(results),
            seed=cfg.master_seed,
        ))
    return records


def run_campaign(cfg, experiment, workers=None, ledger_path=None):
    """
    Runs cfg.trials trials per SNR of the experiment grid and aggregates them into one
    MetricRecord per (method, snr, block) cell. Trials are folded in trial-index order.
    :type cfg: SystemConfig
    :type experiment: str one of fig2, fig3, fig4
    :type workers: int worker processes, cfg.workers when None
    :type ledger_path: str TinyDB file receiving per-trial values, cfg.ledger_path when None
    :return: list of MetricRecord
    """
    if experiment not in EXPERIMENTS:
        raise CampaignError('unknown experiment {!r}, expected one of {}'.format(experiment, ', '.join(EXPERIMENTS)))

    if workers is None:
        workers = cfg.workers
    if ledger_path is None:
        ledger_path = cfg.ledger_path

    ledger = TrialLedger(ledger_path) if ledger_path else None

    records = []
    try:
        for snr_db in cfg.snr_grid(experiment):
            logger.info(
                'campaign {experiment}: {trials} trials at {snr_db} dB on {workers} worker(s)',
                experiment=experiment, trials=cfg.trials, snr_db=snr_db, workers=workers,
            )

            results = _run_trials(cfg, experiment, snr_db, workers)
            if ledger is not None:
                ledger.record(results)

            completed = [r for r in results if not r.skipped]
            skipped = len(results) - len(completed)
            if skipped > cfg.max_skip_fraction * len(results) or not completed:
                raise CampaignError('{} of {} trials skipped at {} dB, first diagnostic: {}'.format(
                    skipped, len(results), snr_db, next(r.diagnostic for r in results if r.skipped)))
            if skipped:
                logger.warn('{skipped} trial(s) skipped at {snr_db} dB', skipped=skipped, snr_db=snr_db)

            records.extend(_fold(cfg, snr_db, completed))
    finally:
        if ledger is not None:
            ledger.close()

    logger.info('campaign {experiment} produced {count} records', experiment=experiment, count=len(records))

    return records


def _format_number(value):
    if value is None:
        return ''
    return '{:.17e}'.format(value)


def write_csv(records, path):
    """
    Writes records sorted by (method, snr_db, block); absent values are empty fields.
    """
    rows = sorted(records, key=lambda r: (r.method, r.snr_db, -1 if r.block is None else r.block))

    try:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow([
                    r.method,
                    repr(float(r.snr_db)),
                    '' if r.block is None else r.block,
                    _format_number(r.nmse),
                    _format_number(r.ser),
                    r.trials,
                    r.seed,
                ])
    except (IOError, OSError) as e:
        raise CampaignError('cannot write results to {}: {}'.format(path, e))

    logger.info('wrote {count} records to {path}', count=len(rows), path=path)
