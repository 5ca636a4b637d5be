import csv
import sys

import click

from twisted.logger import (
    FilteringLogObserver,
    Logger,
    LogLevel,
    LogLevelFilterPredicate,
    globalLogBeginner,
    textFileLogObserver,
)

from .. import CSV_SCHEMA_VERSION, SEMIBLIND_VERSION
from ..channel import reference_channel, sample_scenario
from ..errors import CampaignError, ConfigError
from .bench import bench_kernels
from .campaign import run_campaign, trial_rng, write_csv
from .config import EXPERIMENTS, SystemConfig, dump_config, parse_config, with_overrides
from .ledger import ledger_summary


__all__ = ['cli', 'main']


logger = Logger()

level_filter = LogLevelFilterPredicate(defaultLogLevel=LogLevel.info)

logging_started = False


def start_logging():
    global logging_started
    if logging_started:
        return

    globalLogBeginner.beginLoggingTo(
        [FilteringLogObserver(textFileLogObserver(sys.stderr), [level_filter])],
        redirectStandardIO=False,
    )
    logging_started = True


def load_config(config_path):
    if config_path is None:
        return SystemConfig()
    return parse_config(config_path)


def parse_snr_list(text):
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ConfigError('expected comma separated numbers, got {!r}'.format(text), key='snr_grid_db',
                          location='command line')


def format_complex(value):
    return '{:.17e}{:+.17e}j'.format(value.real, value.imag)


def fail(error, code):
    click.echo('error: {}'.format(error), err=True)
    sys.exit(code)


@click.group()
@click.version_option(version=SEMIBLIND_VERSION, message='semiblind %(version)s, csv schema ' + CSV_SCHEMA_VERSION)
@click.option('--verbose', is_flag=True, default=False, help='log debug events')
def cli(verbose):
    level_filter.defaultLogLevel = LogLevel.debug if verbose else LogLevel.info


@click.command()
@click.argument('experiment', type=click.Choice(EXPERIMENTS))
@click.option('--config', 'config_path', type=click.Path(), default=None)
@click.option('--trials', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--snr-list', default=None, help='comma separated SNR values in dB')
@click.option('--workers', type=int, default=None)
@click.option('--ledger', 'ledger_path', default=None, help='TinyDB file receiving per-trial values')
@click.option('--output', 'output_path', default=None)
def simulate(experiment, config_path, trials, seed, snr_list, workers, ledger_path, output_path):
    """
    Runs the Monte Carlo campaign of an experiment and writes the aggregated CSV.
    """
    try:
        cfg = load_config(config_path)

        grid_key = 'fig3_snr_grid_db' if experiment == 'fig3' else 'snr_grid_db'
        overrides = {
            'trials': trials,
            'master_seed': seed,
            'workers': workers,
            'ledger_path': ledger_path,
            'output_path': output_path,
            grid_key: None if snr_list is None else parse_snr_list(snr_list),
        }
        cfg = with_overrides(cfg, **overrides)
    except ConfigError as e:
        fail(e, 1)

    try:
        records = run_campaign(cfg, experiment)
        write_csv(records, cfg.output_path)
    except CampaignError as e:
        fail(e, 2)

    click.echo('{} records written to {}'.format(len(records), cfg.output_path))


@click.command()
@click.option('--config', 'config_path', type=click.Path(), default=None)
@click.option('--seed', type=int, default=None)
@click.option('--experiment', type=click.Choice(EXPERIMENTS), default='fig3')
@click.option('--snr', type=float, default=None, help='SNR of the trial, first grid value by default')
@click.option('--trial', type=int, default=0)
@click.option('--output', 'output_path', default=None, help='CSV file, standard output when omitted')
def dump_channel(config_path, seed, experiment, snr, trial, output_path):
    """
    Dumps the steering matrix and the per-symbol effective channel of one trial's scenario.
    """
    try:
        cfg = with_overrides(load_config(config_path), master_seed=seed)
    except ConfigError as e:
        fail(e, 1)

    if snr is None:
        snr = cfg.snr_grid(experiment)[0]

    # the scenario is the first draw of a trial, so this reproduces the campaign's channel
    state = sample_scenario(trial_rng(cfg.master_seed, experiment, snr, trial), cfg)
    layout = cfg.layout()
    channel = reference_channel(state, cfg.timing(), range(layout.total_symbols))

    rows = []
    for kind, matrix in (('steering', state.steering), ('channel', channel)):
        for (row, col), value in _enumerate(matrix):
            rows.append((kind, row, col, format_complex(value)))

    try:
        if output_path is None:
            _write_rows(click.get_text_stream('stdout'), rows)
        else:
            with open(output_path, 'w', newline='') as f:
                _write_rows(f, rows)
    except (IOError, OSError) as e:
        fail(CampaignError('cannot write {}: {}'.format(output_path, e)), 2)


def _enumerate(matrix):
    for row in range(matrix.shape[0]):
        for col in range(matrix.shape[1]):
            yield (row, col), matrix[row, col]


def _write_rows(stream, rows):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(('kind', 'row', 'col', 'value'))
    writer.writerows(rows)


@click.command()
@click.option('--config', 'config_path', type=click.Path(), default=None)
@click.option('--number', type=int, default=100, help='calls per kernel')
def bench(config_path, number):
    """
    Prints the mean time per call of the estimator kernels.
    """
    try:
        cfg = load_config(config_path)
    except ConfigError as e:
        fail(e, 1)

    for kernel, operations, seconds in bench_kernels(cfg, number=number):
        click.echo('{:<18} O({:<24}) {:.3e} s'.format(kernel, operations + ')', seconds))


@click.command()
def print_defaults():
    """
    Prints the default configuration in the text format read by --config.
    """
    click.echo(dump_config(SystemConfig()), nl=False)


@click.command()
@click.option('--ledger', 'ledger_path', required=True, type=click.Path(exists=True))
@click.option('--experiment', type=click.Choice(EXPERIMENTS), default=None)
def ledger_stats(ledger_path, experiment):
    """
    Prints per-cell mean, standard deviation and count of a trial ledger.
    """
    click.echo('experiment,method,snr_db,block,metric,mean,std,count')
    for exp, method, snr_db, block, metric, mean, std, count in ledger_summary(ledger_path, experiment):
        click.echo('{},{},{!r},{},{},{:.17e},{:.17e},{}'.format(
            exp, method, snr_db, '' if block is None else block, metric, mean, std, count))


cli.add_command(simulate)
cli.add_command(dump_channel)
cli.add_command(bench)
cli.add_command(print_defaults)
cli.add_command(ledger_stats)


def main():
    start_logging()
    cli()


if __name__ == '__main__':
    main()
