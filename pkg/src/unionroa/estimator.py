"""scikit-learn style front end.

``fit`` runs the multi-round search for a system; ``predict`` then answers
ROA-estimate membership for state samples.

>>> est = UnionRoaEstimator(rounds=None).fit("vdp")      # doctest: +SKIP
>>> est.predict([[0.0, 0.5], [2.5, 2.5]])               # doctest: +SKIP
array([ True, False])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import bench
from .poly import DynamicalSystem
from .vsiter import IterationConfig, run_multiround


class UnionRoaEstimator(BaseEstimator):
    """Lyapunov-based ROA estimate enlarged by a union of shape functions.

    Parameters
    ----------
    rounds : list of RoundConfig or None
        Shape-function rounds.  ``None`` takes the preset's rounds when
        ``fit`` receives a preset name.
    deg_V, deg_s0, deg_si, l_eps, gamma_bisect_tol, beta_bisect_tol,
    beta_stall_tol, max_iters, backoff, rescale
        Passed to :class:`~unionroa.vsiter.IterationConfig`.
    Q : array or None
        Weight of the Lyapunov equation for the initial quadratic candidate.
    """

    def __init__(
        self,
        rounds=None,
        deg_V=6,
        deg_s0=(2, 4),
        deg_si=(0, 4),
        l_eps=1e-6,
        gamma_bisect_tol=1e-3,
        beta_bisect_tol=1e-3,
        beta_stall_tol=1e-3,
        max_iters=100,
        backoff=1e-3,
        rescale=True,
        Q=None,
    ):
        self.rounds = rounds
        self.deg_V = deg_V
        self.deg_s0 = deg_s0
        self.deg_si = deg_si
        self.l_eps = l_eps
        self.gamma_bisect_tol = gamma_bisect_tol
        self.beta_bisect_tol = beta_bisect_tol
        self.beta_stall_tol = beta_stall_tol
        self.max_iters = max_iters
        self.backoff = backoff
        self.rescale = rescale
        self.Q = Q

    def iteration_config(self) -> IterationConfig:
        return IterationConfig(
            deg_V=self.deg_V,
            deg_s0=tuple(self.deg_s0),
            deg_si=tuple(self.deg_si),
            l_eps=self.l_eps,
            gamma_bisect_tol=self.gamma_bisect_tol,
            beta_bisect_tol=self.beta_bisect_tol,
            beta_stall_tol=self.beta_stall_tol,
            max_iters=self.max_iters,
            backoff=self.backoff,
            rescale=self.rescale,
        )

    def fit(self, system, y=None):
        """Run the search for ``system`` (a DynamicalSystem or preset name)."""
        rounds = self.rounds
        if isinstance(system, str):
            preset = bench.get(system)
            system = preset.system
            if rounds is None:
                rounds = preset.rounds
        if not isinstance(system, DynamicalSystem):
            raise TypeError("fit expects a DynamicalSystem or a preset name")
        if rounds is None:
            raise ValueError("rounds must be given for a custom system")
        result = run_multiround(system, rounds, self.iteration_config(), Q=self.Q)
        self.system_ = system
        self.result_ = result
        self.certificate_ = result.certificate
        self.V_ = self.certificate_.V
        self.gamma_ = self.certificate_.gamma
        self.n_features_in_ = system.nvars
        return self

    def _check_X(self, X):
        check_is_fitted(self, "certificate_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X

    def decision_function(self, X):
        """``gamma - V(x)``: positive inside the certified region."""
        X = self._check_X(X)
        return self.gamma_ - self.V_(X)

    def predict(self, X):
        return self.decision_function(X) >= 0

    def score(self, X, y):
        """Fraction of samples whose membership matches ``y``."""
        y = np.asarray(y, dtype=bool)
        return float(np.mean(self.predict(X) == y))
