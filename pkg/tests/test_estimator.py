import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from apfree import ProgressionFreeSelector
from apfree.progression import verify_free
from apfree.validation import DomainError

FAST = dict(mc_samples=20_000, z_candidates=9, trials=4)


def test_params_round_trip_and_clone():
    est = ProgressionFreeSelector(k=5, D=2, random_state=3, **FAST)
    params = est.get_params()
    assert params["k"] == 5 and params["D"] == 2 and params["random_state"] == 3
    assert clone(est).get_params() == params


def test_fit_transform():
    X = np.arange(1, 61) ** 2
    est = ProgressionFreeSelector(random_state=1, **FAST).fit(X)
    kept = est.transform(X)
    assert verify_free(kept.tolist(), 3, 1).is_free
    assert est.get_support(X).sum() == len(est.subset_) == len(kept)
    assert est.score(X) == pytest.approx(len(kept) / len(X))
    assert est.certificate_.is_free
    again = ProgressionFreeSelector(random_state=1, **FAST).fit_transform(X)
    assert np.array_equal(kept, again)


def test_unfitted_and_invalid():
    with pytest.raises(NotFittedError):
        ProgressionFreeSelector().transform([1, 2, 3])
    with pytest.raises(DomainError):
        ProgressionFreeSelector(k=4, D=2).fit([1, 2, 3])
