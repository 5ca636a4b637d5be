import logging

import numpy as np

from semiblind.harness import SystemConfig, StageChain, TrialApp, build_experiment


def pre_processing_mock_function(data):
    data['field'] = 0

    return data


def post_processing_mock_function(data):
    data['field'] += 1

    return data


def inference_mock_function(data):
    data['field'] += 10

    return data


class AddStage(object):
    def __init__(self, amount):
        super(AddStage, self).__init__()
        self.amount = amount

    def __call__(self, data):
        data['field'] = data['field'] * 10 + self.amount

        return data


mock_app = TrialApp(
    preprocess_fun=pre_processing_mock_function,
    inference_fun=inference_mock_function,
    postprocess_fun=post_processing_mock_function
)


def test_trialapp_answer():
    logging.info('TESTING TRIAL APP INIT FUNCTION')
    assert mock_app.preprocess_fun == pre_processing_mock_function
    assert mock_app.inference_fun == inference_mock_function
    assert mock_app.postprocess_fun == post_processing_mock_function


def test_trialapp_basic_functionality():
    data = {}

    result = mock_app(data)

    return result


def test_trialapp_basic_functionality_answer():
    logging.info('TESTING TRIAL APP BASIC FUNCTIONALITY')

    result = test_trialapp_basic_functionality()

    assert isinstance(result, dict)
    assert sorted(result.keys()) == ['elapsed_s', 'field']
    assert result['field'] == 11
    assert result['elapsed_s'] >= 0.


def test_stage_chain_applies_stages_in_order():
    logging.info('TESTING STAGE CHAIN')
    chain = StageChain([AddStage(1), AddStage(2), AddStage(3)])

    assert chain({'field': 0})['field'] == 123
    assert StageChain([])({'field': 4})['field'] == 4


def test_experiment_apps_report_expected_cells():
    logging.info('TESTING EXPERIMENT PIPELINES')
    cfg = SystemConfig(
        m_x=4, m_y=4, k_users=3, pilots=5, data_symbols=5, n_blocks=6, update_interval=2,
        normalized_pathloss=True, fig4_blocks=(2, 6),
    )

    def run(experiment):
        app = build_experiment(experiment, cfg)
        return app({'config': cfg, 'rng': np.random.default_rng(0), 'snr_db': 10.})

    fig2 = run('fig2')
    assert [(m, b) for m, b, _ in fig2['nmse']] == [('P-LS', 0), ('DD-SB', 1)]
    assert fig2['ser'] == []
    assert fig2['layout'].n_blocks == 1

    fig3 = run('fig3')
    assert [(m, b) for m, b, _ in fig3['nmse']] == [
        ('P-LS', 0),
        ('P-bound', 2), ('P-bound', 4), ('P-bound', 6),
        ('MDD-SB', 2), ('MDD-SB', 4), ('MDD-SB', 6),
        ('MDD-SB-KD', 2), ('MDD-SB-KD', 4), ('MDD-SB-KD', 6),
    ]
    assert fig3['ser'] == []

    fig4 = run('fig4')
    assert fig4['nmse'] == []
    assert [(m, b) for m, b, _ in fig4['ser']] == [
        ('P-bound', 2), ('P-bound', 6), ('MDD-SB', 2), ('MDD-SB', 6), ('GA', 2), ('GA', 6),
    ]
    assert fig4['layout'].n_blocks == 6
    assert all(0. <= value <= 1. for _, _, value in fig4['ser'])
