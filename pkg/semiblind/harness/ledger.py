from collections import OrderedDict

import numpy as np

from tinydb import Query, TinyDB
from twisted.logger import Logger


__all__ = ['TrialLedger', 'ledger_summary']


logger = Logger()


def _cell_key(method, block):
    return '{}@{}'.format(method, '-' if block is None else block)


def _split_key(key):
    method, block = key.rsplit('@', 1)
    return method, None if block == '-' else int(block)


class TrialLedger(object):
    """
    TinyDB store of per-trial metric values, one document per trial.
    """
    def __init__(self, path):
        super(TrialLedger, self).__init__()
        self.path = path
        self.db = TinyDB(path)

    def record(self, results):
        documents = []
        for result in results:
            documents.append({
                'experiment': result.experiment,
                'snr_db': result.snr_db,
                'trial': result.trial_index,
                'seed': '{:064x}'.format(result.seed),
                'skipped': result.skipped,
                'diagnostic': result.diagnostic,
                'elapsed_s': result.elapsed_s,
                'nmse': {_cell_key(method, block): value for method, block, value in result.nmse},
                'ser': {_cell_key(method, block): value for method, block, value in result.ser},
            })

        self.db.insert_multiple(documents)
        logger.debug('ledger {path}: stored {count} trials', path=self.path, count=len(documents))

    def trials(self, experiment=None):
        if experiment is None:
            return self.db.all()

        Trial = Query()
        return self.db.search(Trial.experiment == experiment)

    def close(self):
        self.db.close()


def ledger_summary(path, experiment=None):
    """
    Per-cell statistics of the completed trials in a ledger.
    :return: list of (experiment, method, snr_db, block, metric, mean, std, count) ordered by
    experiment, method, snr_db, block and metric
    """
    ledger = TrialLedger(path)
    try:
        documents = ledger.trials(experiment)
    finally:
        ledger.close()

    cells = OrderedDict()
    for document in sorted(documents, key=lambda d: (d['experiment'], d['snr_db'], d['trial'])):
        if document['skipped']:
            continue
        for metric in ('nmse', 'ser'):
            for key, value in document[metric].items():
                method, block = _split_key(key)
                cells.setdefault((document['experiment'], method, document['snr_db'], block, metric), []).append(value)

    rows = []
    for (exp, method, snr_db, block, metric), values in cells.items():
        values = np.asarray(values, dtype=np.float64)
        rows.append((exp, method, snr_db, block, metric, float(values.mean()), float(values.std()), len(values)))

    return sorted(rows, key=lambda r: (r[0], r[1], r[2], -1 if r[3] is None else r[3], r[4]))
