import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from satprob import CapacityError, InputError, distributions as dists


def test_uniform_two_bits():
    d = dists.uniform(2)
    np.testing.assert_allclose(d.probabilities, [0.25, 0.25, 0.25, 0.25])


def test_iid_deterministic_bits_concentrates_mass():
    # q[0]=1 forces bit 0 high, q[1]=0 forces bit 1 low -> scenario index 1
    d = dists.iid_bernoulli(2, [1.0, 0.0])
    np.testing.assert_allclose(d.probabilities, [0.0, 1.0, 0.0, 0.0])


def test_iid_half_matches_uniform():
    np.testing.assert_allclose(
        dists.iid_bernoulli(6, 0.5).probabilities, dists.uniform(6).probabilities
    )


def test_explicit_accepts_zero_entries():
    d = dists.explicit([0.2, 0.3, 0.5, 0.0])
    assert d.probabilities[3] == 0.0
    assert d.size == 4


def test_explicit_normalizes():
    d = dists.explicit([2.0, 6.0])
    np.testing.assert_allclose(d.probabilities, [0.25, 0.75])


@pytest.mark.parametrize(
    "bad",
    [[-0.1, 1.1], [0.0, 0.0], [0.5, 0.25, 0.25]],
)
def test_explicit_rejects_bad_vectors(bad):
    with pytest.raises(InputError):
        dists.explicit(bad)


def test_iid_rejects_out_of_range_bits():
    with pytest.raises(InputError):
        dists.iid_bernoulli(2, [0.5, 1.5])


def test_dense_storage_cap():
    with pytest.raises(CapacityError):
        dists.uniform(15)


def test_amplitudes_square_to_probabilities():
    d = dists.explicit([0.36, 0.64])
    np.testing.assert_allclose(d.amplitudes(), [0.6, 0.8])
    np.testing.assert_allclose(d.amplitudes() ** 2, d.probabilities, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4))
def test_amplitude_roundtrip_property(vec):
    total = sum(vec)
    if total <= 0:
        return
    d = dists.explicit(vec)
    assert abs(float(d.probabilities.sum()) - 1.0) < 1e-12
    np.testing.assert_allclose(d.amplitudes() ** 2, d.probabilities, atol=1e-12)


def test_sampling_reproducible_and_unbiased():
    d = dists.uniform(1)
    draws1 = d.sample(np.random.default_rng(123), 100_000)
    draws2 = d.sample(np.random.default_rng(123), 100_000)
    np.testing.assert_array_equal(draws1, draws2)
    assert abs(float(np.mean(draws1)) - 0.5) < 0.01


def test_point_mass_sampling():
    d = dists.point_mass(3, 5)
    draws = d.sample(np.random.default_rng(0), 50)
    assert set(draws.tolist()) == {5}


def test_iid_half_sampling_matches_uniform_chisquare():
    d = dists.iid_bernoulli(6, 0.5)
    draws = d.sample(np.random.default_rng(2024), 100_000)
    counts = np.bincount(draws, minlength=64)
    result = stats.chisquare(counts)
    assert result.pvalue > 0.001


def test_from_config_variants():
    assert dists.from_config({"kind": "uniform"}, 3).size == 8
    d = dists.from_config({"kind": "iid", "q": [0.2, 0.8]}, 2)
    assert abs(float(d.probabilities.sum()) - 1.0) < 1e-12
    d = dists.from_config({"kind": "explicit", "p": [0.5, 0.5]}, 1)
    assert d.b == 1
    with pytest.raises(InputError):
        dists.from_config({"kind": "iid", "q": [0.5]}, 2)
    with pytest.raises(InputError):
        dists.from_config({"kind": "explicit", "p": [0.5, 0.5]}, 2)
    with pytest.raises(InputError):
        dists.from_config({"kind": "mystery"}, 2)
