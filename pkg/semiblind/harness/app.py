import time


__all__ = ['TrialApp', 'StageChain']


class StageChain(object):
    def __init__(self, stages_list):
        super(StageChain, self).__init__()
        self.stages_list = stages_list

    def __call__(self, data):
        for stage in self.stages_list:
            data = stage(data)

        return data


class TrialApp(object):
    """
    A TrialApp implements the workflow of one Monte Carlo trial: scenario and frame generation,
    estimation, and metric extraction, all operating on a shared data dictionary.
    """
    def __init__(self, preprocess_fun, inference_fun, postprocess_fun):
        """
        To instantiate a TrialApp the following arguments are needed
        :type preprocess_fun: Callable function or callable object generating scenario and frame
        :type inference_fun: Callable function or callable object running the estimators
        :type postprocess_fun: Callable function or callable object computing metrics
        """
        super(TrialApp, self).__init__()
        self.preprocess_fun = preprocess_fun
        self.inference_fun = inference_fun
        self.postprocess_fun = postprocess_fun

    def __call__(self, data):
        """
        When a TrialApp object is called it performs generation, estimation and evaluation
        :type data: dict dictionary containing at least 'config', 'rng' and 'snr_db'
        :return: dict containing the trial data with the metric fields filled in
        """
        start = time.perf_counter()

        transformed_data = self.preprocess_fun(data)

        result = self.inference_fun(transformed_data)

        transformed_result = self.postprocess_fun(result)

        transformed_result['elapsed_s'] = time.perf_counter() - start

        return transformed_result
