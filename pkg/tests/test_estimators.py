import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hydrodeconv import AMDeconvolver, GridSearchDeconvolver, XCorrDeconvolver
from hydrodeconv.signals import convolve
from hydrodeconv.select import snr_db
from hydrodeconv.synth import KernelSpec, make_scenario

from helpers import assert_causal_nonneg


@pytest.fixture(scope="module")
def scenario():
    return make_scenario(
        500, KernelSpec(support_length=40, amplitude=40.0), 100.0, 25.0, seed=5
    )


class TestAMDeconvolver:
    def test_fit_exposes_solution(self, scenario):
        est = AMDeconvolver(kernel_length=80, lam=1e2).fit(scenario.x, scenario.y_noisy)
        assert est.kernel_.shape == (80,)
        assert_causal_nonneg(est.kernel_)
        assert np.all(np.diff(est.objective_trace_) <= 0)
        assert isinstance(est.converged_, bool)
        ref = convolve(scenario.x, est.kernel_) + est.offset_
        assert np.allclose(est.reconstruction_, ref)

    def test_predict_applies_fitted_kernel(self, scenario):
        est = AMDeconvolver(kernel_length=80, lam=1e2).fit(scenario.x, scenario.y_noisy)
        pred = est.predict(scenario.x)
        assert np.allclose(pred, est.reconstruction_)
        other = np.abs(np.random.default_rng(0).standard_normal(300))
        assert est.predict(other).shape == (300,)

    def test_unfitted_predict_raises(self, scenario):
        with pytest.raises(NotFittedError):
            AMDeconvolver(kernel_length=10).predict(scenario.x)

    def test_negative_rainfall_rejected(self, scenario):
        x = scenario.x.copy()
        x[3] = -1.0
        with pytest.raises(ValueError, match="nonnegative"):
            AMDeconvolver(kernel_length=20).fit(x, scenario.y_noisy)

    def test_sklearn_param_protocol(self):
        est = AMDeconvolver(kernel_length=40, lam=2.0, s_max=7)
        params = est.get_params()
        assert params["kernel_length"] == 40 and params["lam"] == 2.0
        cloned = clone(est)
        assert cloned.get_params() == params
        est.set_params(lam=5.0)
        assert est.lam == 5.0

    def test_column_input_accepted(self, scenario):
        est = AMDeconvolver(kernel_length=40, lam=1e2)
        est.fit(scenario.x.reshape(-1, 1), scenario.y_noisy)
        assert est.kernel_.shape == (40,)


class TestXCorrDeconvolver:
    def test_fit_predict(self, scenario):
        est = XCorrDeconvolver(kernel_length=80).fit(scenario.x, scenario.y_noisy)
        assert est.kernel_.shape == (80,)
        assert np.allclose(
            est.predict(scenario.x),
            convolve(scenario.x, est.kernel_) + est.offset_,
        )

    def test_params_roundtrip(self):
        est = XCorrDeconvolver(kernel_length=16, demean=False, normalization="unbiased")
        assert clone(est).get_params() == est.get_params()


class TestGridSearchDeconvolver:
    def test_blind_strategies_fit(self, scenario):
        for strategy in ("fidelity", "corrCoeff"):
            est = GridSearchDeconvolver(
                kernel_length=80,
                grid=np.logspace(-2, 8, 6),
                strategy=strategy,
            ).fit(scenario.x, scenario.y_noisy)
            assert est.lambda_ in est.report_.lambdas
            assert_causal_nonneg(est.kernel_)

    def test_oracle_needs_ground_truth(self, scenario):
        est = GridSearchDeconvolver(kernel_length=80, strategy="oracle",
                                    grid=np.logspace(0, 6, 4))
        with pytest.raises(ValueError, match="oracle"):
            est.fit(scenario.x, scenario.y_noisy)
        est.set_params(ground_truth=scenario.k_true)
        est.fit(scenario.x, scenario.y_noisy)
        k_snr = snr_db(scenario.k_true, est.kernel_)
        assert np.isfinite(k_snr)

    def test_discrepancy_needs_noise_variance(self, scenario):
        est = GridSearchDeconvolver(kernel_length=80, strategy="discrepancy",
                                    grid=np.logspace(0, 6, 4))
        with pytest.raises(ValueError, match="discrepancy"):
            est.fit(scenario.x, scenario.y_noisy)
        est.set_params(noise_variance=scenario.noise_variance)
        est.fit(scenario.x, scenario.y_noisy)
        assert est.lambda_ > 0

    def test_unknown_strategy_rejected(self, scenario):
        est = GridSearchDeconvolver(kernel_length=80, strategy="lcurve")
        with pytest.raises(ValueError, match="strategy"):
            est.fit(scenario.x, scenario.y_noisy)
