from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .base_sets import EXACT_CAP
from .constructor import (
    DEFAULT_D_MIN,
    DEFAULT_MC_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    run_construction,
)
from .geometry import DEFAULT_Z_CANDIDATES
from .validation import check_intset


class ProgressionFreeSelector(TransformerMixin, BaseEstimator):
    """Select a large subset of an integer set with no k-term D-progressions.

    ``fit`` runs the randomized torus construction on the 1-D integer array
    ``X``; ``transform`` keeps the entries of ``X`` that belong to the
    selected subset. The selected subset is certified progression-free.

    Parameters
    ----------
    k, D : int
        Progression length and degree bound; requires ``k > 2 * D``.
    trials : int
        Independent (theta, alpha) draws; the best one is kept.
    random_state : int
        Master seed. Results are a deterministic function of it.
    psi, d, delta, n0, type_count : optional
        Overrides for the derived construction parameters.

    Attributes
    ----------
    subset_ : IntSet
    result_ : ConstructionResult
    """

    def __init__(
        self,
        k=3,
        D=1,
        *,
        trials=DEFAULT_TRIALS,
        random_state=DEFAULT_SEED,
        psi=None,
        d=None,
        delta=None,
        n0=None,
        type_count=None,
        mc_samples=DEFAULT_MC_SAMPLES,
        z_candidates=DEFAULT_Z_CANDIDATES,
        d_min=DEFAULT_D_MIN,
        base_strategy="auto",
        exact_cap=EXACT_CAP,
        n_jobs=1,
    ):
        self.k = k
        self.D = D
        self.trials = trials
        self.random_state = random_state
        self.psi = psi
        self.d = d
        self.delta = delta
        self.n0 = n0
        self.type_count = type_count
        self.mc_samples = mc_samples
        self.z_candidates = z_candidates
        self.d_min = d_min
        self.base_strategy = base_strategy
        self.exact_cap = exact_cap
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        values = check_intset(X)
        self.result_ = run_construction(
            values,
            self.k,
            self.D,
            trials=self.trials,
            master_seed=self.random_state,
            n_jobs=self.n_jobs,
            base_strategy=self.base_strategy,
            exact_cap=self.exact_cap,
            psi=self.psi,
            d=self.d,
            delta=self.delta,
            N0=self.n0,
            type_count=self.type_count,
            mc_samples=self.mc_samples,
            z_candidates=self.z_candidates,
            d_min=self.d_min,
        )
        self.subset_ = self.result_.best_subset
        self.certificate_ = self.result_.certificate
        return self

    def get_support(self, X) -> np.ndarray:
        """Boolean mask over ``X`` marking entries in the selected subset."""
        check_is_fitted(self, "subset_")
        values = np.asarray(X).ravel()
        members = self.subset_.members
        return np.fromiter((int(v) in members for v in values), dtype=bool, count=len(values))

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X)
        return X.ravel()[self.get_support(X)]

    def score(self, X, y=None) -> float:
        """Relative density of the selected subset within ``X``."""
        mask = self.get_support(X)
        return float(mask.mean()) if len(mask) else 0.0
