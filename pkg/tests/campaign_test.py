import csv
import logging
from dataclasses import replace

import pytest
from scipy.stats import spearmanr

from semiblind.errors import CampaignError
from semiblind.harness import (
    CSV_HEADER,
    SystemConfig,
    ledger_summary,
    run_campaign,
    run_trial,
    trial_entropy,
    trial_rng,
    write_csv,
)
from semiblind.metrics import MetricRecord


tiny_config = SystemConfig(
    m_x=4, m_y=4, k_users=3, pilots=5, data_symbols=5, n_blocks=4, update_interval=2,
    snr_grid_db=(0., 20.), fig3_snr_grid_db=(10.,), fig4_blocks=(2, 4),
    trials=4, master_seed=3, normalized_pathloss=True,
)

# no placement can keep two users 1.5 apart on the periodic direction-cosine plane
impossible_config = replace(tiny_config, k_users=2, guard_distance=1.5, max_resamples=3, trials=2)


def test_trial_seeds_are_stable_and_distinct():
    logging.info('TESTING PER TRIAL SEEDS')
    seed = trial_entropy(1, 'fig2', 10., 0)

    assert seed == trial_entropy(1, 'fig2', 10, 0)
    assert seed != trial_entropy(1, 'fig2', 10., 1)
    assert seed != trial_entropy(1, 'fig3', 10., 0)
    assert seed != trial_entropy(2, 'fig2', 10., 0)
    assert seed != trial_entropy(1, 'fig2', 5., 0)
    assert 0 <= seed < 2 ** 256

    assert trial_rng(1, 'fig2', 10., 0).integers(0, 2 ** 62) == trial_rng(1, 'fig2', 10., 0).integers(0, 2 ** 62)


def test_run_trial_is_reproducible():
    logging.info('TESTING TRIAL REPRODUCIBILITY')
    first = run_trial(tiny_config, 2, 10., 'fig3')
    second = run_trial(tiny_config, 2, 10., 'fig3')

    assert not first.skipped
    assert first.nmse == second.nmse
    assert first.seed == second.seed
    assert first.trial_index == 2
    assert run_trial(tiny_config, 3, 10., 'fig3').nmse != first.nmse


def test_run_trial_records_skipped_trials():
    result = run_trial(impossible_config, 0, 10., 'fig2')

    assert result.skipped
    assert result.diagnostic.startswith('ScenarioError')
    assert result.nmse == ()
    assert result.ser == ()


def test_fig2_campaign_records():
    logging.info('TESTING FIG2 CAMPAIGN')
    records = run_campaign(tiny_config, 'fig2')

    assert [(r.method, r.snr_db, r.block) for r in records] == [
        ('P-LS', 0., 0), ('DD-SB', 0., 1), ('P-LS', 20., 0), ('DD-SB', 20., 1),
    ]
    for record in records:
        assert record.trials == tiny_config.trials
        assert record.seed == tiny_config.master_seed
        assert record.nmse > 0.
        assert record.ser is None


def test_fig3_and_fig4_campaign_cells():
    fig3 = run_campaign(tiny_config, 'fig3')
    assert {(r.method, r.block) for r in fig3} == {
        ('P-LS', 0), ('P-bound', 2), ('P-bound', 4), ('MDD-SB', 2), ('MDD-SB', 4), ('MDD-SB-KD', 2), ('MDD-SB-KD', 4),
    }
    assert {r.snr_db for r in fig3} == {10.}

    fig4 = run_campaign(tiny_config, 'fig4')
    assert len(fig4) == 2 * 3 * 2
    assert all(r.nmse is None and 0. <= r.ser <= 1. for r in fig4)


def test_campaign_is_worker_count_invariant(tmp_path):
    logging.info('TESTING CAMPAIGN DETERMINISM')
    inline = tmp_path / 'inline.csv'
    pooled = tmp_path / 'pooled.csv'
    again = tmp_path / 'again.csv'

    write_csv(run_campaign(tiny_config, 'fig2', workers=1), str(inline))
    write_csv(run_campaign(tiny_config, 'fig2', workers=2), str(pooled))
    write_csv(run_campaign(tiny_config, 'fig2', workers=1), str(again))

    assert inline.read_bytes() == pooled.read_bytes()
    assert inline.read_bytes() == again.read_bytes()


def test_campaign_aborts_when_too_many_trials_skip():
    with pytest.raises(CampaignError):
        run_campaign(impossible_config, 'fig2')

    with pytest.raises(CampaignError):
        run_campaign(tiny_config, 'fig5')


def test_write_csv_format(tmp_path):
    logging.info('TESTING CSV OUTPUT')
    records = [
        MetricRecord(method='P-LS', snr_db=10., block=0, nmse=0.125, ser=None, trials=9, seed=1),
        MetricRecord(method='GA', snr_db=-5., block=20, nmse=None, ser=1e-3, trials=10, seed=1),
        MetricRecord(method='GA', snr_db=-5., block=5, nmse=None, ser=0.5, trials=10, seed=1),
    ]
    path = tmp_path / 'results.csv'

    write_csv(records, str(path))

    with open(str(path), newline='') as f:
        rows = list(csv.reader(f))

    assert tuple(rows[0]) == CSV_HEADER
    assert rows[1] == ['GA', '-5.0', '5', '', '{:.17e}'.format(0.5), '10', '1']
    assert rows[2] == ['GA', '-5.0', '20', '', '{:.17e}'.format(1e-3), '10', '1']
    assert rows[3] == ['P-LS', '10.0', '0', '{:.17e}'.format(0.125), '', '9', '1']
    assert float(rows[2][4]) == 1e-3

    with pytest.raises(CampaignError):
        write_csv(records, str(tmp_path / 'missing' / 'results.csv'))


def test_ledger_keeps_per_trial_values(tmp_path):
    logging.info('TESTING TRIAL LEDGER')
    ledger_path = str(tmp_path / 'ledger.json')

    records = run_campaign(tiny_config, 'fig2', ledger_path=ledger_path)
    summary = ledger_summary(ledger_path, 'fig2')

    assert len(summary) == len(records)
    by_cell = {(method, snr_db, block): (mean, std, count) for _, method, snr_db, block, _, mean, std, count in summary}
    for record in records:
        mean, std, count = by_cell[(record.method, record.snr_db, record.block)]
        assert mean == pytest.approx(record.nmse)
        assert std >= 0.
        assert count == tiny_config.trials

    assert ledger_summary(ledger_path, 'fig4') == []


def test_default_scenario_trends():
    logging.info('TESTING CURVE TRENDS OF THE DEFAULT SCENARIO')
    cfg = replace(SystemConfig(), trials=40, snr_grid_db=(-10., 10.), fig4_blocks=(10, 20))

    def cells(records, metric):
        return {(r.method, r.snr_db, r.block): getattr(r, metric) for r in records}

    fig2 = cells(run_campaign(cfg, 'fig2'), 'nmse')
    assert fig2[('DD-SB', 10., 1)] < fig2[('P-LS', 10., 0)]
    assert fig2[('P-LS', -10., 0)] < fig2[('DD-SB', -10., 1)]

    fig3 = cells(run_campaign(cfg, 'fig3'), 'nmse')
    blocks = cfg.layout().scheduled_blocks()
    bound = [fig3[('P-bound', 10., block)] for block in blocks]
    assert spearmanr(blocks, bound)[0] > 0.9
    for block in (30, 40, 50):
        assert fig3[('MDD-SB', 10., block)] < fig3[('P-bound', 10., block)]

    fig4 = cells(run_campaign(replace(cfg, snr_grid_db=(20.,)), 'fig4'), 'ser')
    assert fig4[('P-bound', 20., 10)] < fig4[('P-bound', 20., 20)]
    assert fig4[('MDD-SB', 20., 20)] < fig4[('P-bound', 20., 20)]
    assert fig4[('GA', 20., 20)] <= fig4[('P-bound', 20., 20)]
