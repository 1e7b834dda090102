import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from unionroa import bench
from unionroa.estimator import UnionRoaEstimator
from unionroa.poly import DynamicalSystem, Polynomial


def test_params_roundtrip():
    est = UnionRoaEstimator(max_iters=7, deg_si=(0, 6))
    params = est.get_params()
    assert params["max_iters"] == 7 and params["deg_si"] == (0, 6)
    assert clone(est).get_params() == params
    cfg = est.iteration_config()
    assert cfg.max_iters == 7 and cfg.deg_si == (0, 6)


def test_unfitted():
    with pytest.raises(NotFittedError):
        UnionRoaEstimator().predict([[0.0, 0.0]])


def test_fit_rejects_bad_input():
    with pytest.raises(TypeError):
        UnionRoaEstimator(rounds=[]).fit(42)
    x1, x2 = Polynomial.variables(2)
    with pytest.raises(ValueError):
        UnionRoaEstimator().fit(DynamicalSystem((-x1, -x2)))


@pytest.fixture(scope="module")
def fitted():
    p = bench.get("vdp")
    return UnionRoaEstimator(rounds=p.rounds[:1], max_iters=2).fit("vdp")


def test_fit_attributes(fitted):
    assert fitted.n_features_in_ == 2
    assert fitted.gamma_ == fitted.certificate_.gamma
    assert fitted.V_ == fitted.certificate_.V
    assert len(fitted.result_.rounds) == 1


def test_predict_and_decision(fitted):
    X = np.array([[0.0, 0.0], [0.1, 0.1], [5.0, 5.0]])
    d = fitted.decision_function(X)
    assert np.allclose(d, fitted.gamma_ - fitted.V_(X))
    assert list(fitted.predict(X)) == [True, True, False]
    assert fitted.score(X, [True, True, False]) == 1.0
    with pytest.raises(ValueError):
        fitted.predict([[0.0, 0.0, 0.0]])
