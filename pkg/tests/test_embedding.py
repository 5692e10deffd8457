"""Embedding parsing, preparation scaling, and triplet noise fitting.

The preparation scale for the 3-point hand case was derived once by the
independent route below (plain numpy: mean, 1/N covariance, eigvalsh) and its
value frozen; the test keeps both routes so neither can drift alone.
"""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefsearch.embedding import (
    K_MAX,
    DegenerateEmbeddingError,
    Embedding,
    EmbeddingFormatError,
    Triplet,
    fit_k0,
    item_covariance,
    load_embedding,
    load_triplets,
    prepare_embedding,
    triplet_error_fraction,
    triplet_log_likelihood,
)
from prefsearch.response_model import NoiseSchemeConfig

HAND_ITEMS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
# frozen: sqrt(2) / (3 sqrt(lam_min)) for the hand items
HAND_SCALE = 1.1976053381271583


def _independent_preparation(items):
    """Reference route: definitions transcribed directly, no library calls
    shared with prepare_embedding beyond basic numpy."""
    c = items.mean(axis=0)
    centered = items - c
    cov = centered.T @ centered / items.shape[0]
    lam_min = float(np.linalg.eigvalsh(cov)[0])
    s = math.sqrt(items.shape[1]) / (3.0 * math.sqrt(lam_min))
    return centered * s, s, c


def test_preparation_matches_independent_route_and_frozen_scale():
    expected_items, s, c = _independent_preparation(HAND_ITEMS)
    emb = prepare_embedding(Embedding(items=HAND_ITEMS))
    assert s == pytest.approx(HAND_SCALE, abs=1e-14)
    assert emb.scale_applied == pytest.approx(HAND_SCALE, abs=1e-14)
    np.testing.assert_allclose(emb.items, expected_items, atol=1e-12)
    np.testing.assert_allclose(emb.centroid_removed, c, atol=1e-14)


def test_preparation_postcondition_smallest_eigenvalue():
    # after preparation the smallest covariance eigenvalue is exactly d/9
    rng = np.random.default_rng(3)
    for d in (2, 3, 5):
        items = rng.standard_normal((40, d)) * rng.uniform(0.5, 3.0, d) + rng.normal(0, 2, d)
        emb = prepare_embedding(Embedding(items=items))
        lam_min = np.linalg.eigvalsh(item_covariance(emb.items))[0]
        assert lam_min == pytest.approx(d / 9.0, abs=1e-9)


def test_preparation_is_idempotent():
    rng = np.random.default_rng(4)
    items = rng.standard_normal((30, 3)) * [1.0, 4.0, 0.2] + [5.0, -1.0, 0.0]
    once = prepare_embedding(Embedding(items=items))
    twice = prepare_embedding(once)
    np.testing.assert_allclose(twice.items, once.items, atol=1e-9)
    assert twice.scale_applied == pytest.approx(once.scale_applied, rel=1e-9)
    np.testing.assert_allclose(twice.centroid_removed, once.centroid_removed, atol=1e-9)


def test_preparation_records_invertible_transform():
    rng = np.random.default_rng(5)
    items = rng.standard_normal((25, 2)) * 3.0 + [ma := 2.0, -7.0]
    emb = prepare_embedding(Embedding(items=items))
    recovered = emb.items / emb.scale_applied + emb.centroid_removed
    np.testing.assert_allclose(recovered, items, atol=1e-10)


def test_preparation_rejects_singular_cloud():
    # rank-deficient cloud: all points on a line in R^2
    items = np.outer(np.arange(5.0), [1.0, 2.0])
    with pytest.raises(DegenerateEmbeddingError):
        prepare_embedding(Embedding(items=items))


def test_item_covariance_uses_population_normalization():
    items = np.array([[0.0, 0.0], [2.0, 0.0]])
    # centered rows are (+-1, 0); 1/N convention gives variance 1, not 2
    np.testing.assert_allclose(item_covariance(items), [[1.0, 0.0], [0.0, 0.0]], atol=0)


def test_load_embedding_accepts_comma_and_whitespace():
    emb_c = load_embedding(io.StringIO("1.0,2.0\n3.0,4.0\n"))
    emb_w = load_embedding(["1.0 2.0", "3.0 4.0"])
    np.testing.assert_allclose(emb_c.items, emb_w.items, atol=0)
    assert emb_c.n_items == 2 and emb_c.dim == 2


def test_load_embedding_skips_single_header_row():
    emb = load_embedding(["x,y", "1,2", "3,4"])
    np.testing.assert_allclose(emb.items, [[1.0, 2.0], [3.0, 4.0]], atol=0)


def test_load_embedding_errors_carry_row_numbers():
    with pytest.raises(EmbeddingFormatError, match="row 3"):
        load_embedding(["1,2", "3,4", "5,oops"])
    with pytest.raises(EmbeddingFormatError, match="ragged row 2"):
        load_embedding(["1,2", "3,4,5"])
    with pytest.raises(EmbeddingFormatError, match="non-finite"):
        load_embedding(["1,2", "3,nan"])
    with pytest.raises(EmbeddingFormatError, match="no data"):
        load_embedding(["", "   "])
    with pytest.raises(EmbeddingFormatError, match="dimension"):
        load_embedding(["1", "2"])
    with pytest.raises(EmbeddingFormatError, match="at least 2 items"):
        load_embedding(["1,2"])


def test_load_embedding_from_file(tmp_path):
    path = tmp_path / "emb.csv"
    path.write_text("0.5, 1.5\n-1.0, 2.0\n")
    emb = load_embedding(path)
    np.testing.assert_allclose(emb.items, [[0.5, 1.5], [-1.0, 2.0]], atol=0)


def test_load_triplets_validation():
    trips = load_triplets(["0,1,2,0", "2,0,1,1"])
    assert trips == [Triplet(0, 1, 2, 0), Triplet(2, 0, 1, 1)]
    with pytest.raises(EmbeddingFormatError, match="4 columns"):
        load_triplets(["0,1,2"])
    with pytest.raises(EmbeddingFormatError, match="integers"):
        load_triplets(["0,1,2,0.5"])
    with pytest.raises(ValueError, match="choice"):
        load_triplets(["0,1,2,3"])
    with pytest.raises(ValueError, match="distinct"):
        load_triplets(["0,0,2,1"])


def test_triplet_index_range_checked():
    emb = Embedding(items=HAND_ITEMS)
    with pytest.raises(ValueError, match="out of range"):
        triplet_error_fraction(emb, [Triplet(0, 1, 7, 0)])


def test_triplet_error_fraction_hand_cases():
    emb = Embedding(items=HAND_ITEMS)
    # reference item 0: item 1 at distance 1, item 2 at distance 2
    assert triplet_error_fraction(emb, [Triplet(0, 1, 2, 0)]) == 0.0
    assert triplet_error_fraction(emb, [Triplet(0, 1, 2, 1)]) == 1.0
    assert triplet_error_fraction(
        emb, [Triplet(0, 1, 2, 0), Triplet(0, 1, 2, 1)]) == 0.5
    # exact tie counts as an error regardless of the recorded choice
    tied = Embedding(items=np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [5.0, 5.0]]))
    assert triplet_error_fraction(tied, [Triplet(0, 1, 2, 0)]) == 1.0
    assert triplet_error_fraction(tied, [Triplet(0, 1, 2, 1)]) == 1.0


def test_triplet_log_likelihood_frozen_hand_values():
    # margin for pair (1, 2) seen from item 0 is +3; frozen log f(+-1.5 * 3)
    emb = Embedding(items=HAND_ITEMS)
    scheme = NoiseSchemeConfig("constant", 1.0)
    assert triplet_log_likelihood(emb, [Triplet(0, 1, 2, 0)], scheme, 1.5) == pytest.approx(
        -0.011047744848593817, abs=1e-15)
    assert triplet_log_likelihood(emb, [Triplet(0, 1, 2, 1)], scheme, 1.5) == pytest.approx(
        -4.511047744848594, abs=1e-12)
    both = triplet_log_likelihood(
        emb, [Triplet(0, 1, 2, 0), Triplet(0, 1, 2, 1)], scheme, 1.5)
    assert both == pytest.approx(-4.522095489697188, abs=1e-12)


def test_triplet_log_likelihood_independent_route():
    # scalar python reimplementation, normalized scheme
    rng = np.random.default_rng(8)
    emb = Embedding(items=rng.standard_normal((10, 3)))
    triplets = [Triplet(0, 1, 2, 0), Triplet(3, 4, 5, 1), Triplet(9, 2, 7, 1)]
    k0 = 2.25
    expected = 0.0
    for t in triplets:
        w, p, q = emb.items[t.reference], emb.items[t.candidate_a], emb.items[t.candidate_b]
        a = 2.0 * (p - q)
        b = float(p @ p - q @ q)
        k = k0 / math.sqrt(float(a @ a))
        m = float(a @ w - b)
        prob0 = 1.0 / (1.0 + math.exp(-k * m))
        expected += math.log(prob0 if t.choice == 0 else 1.0 - prob0)
    got = triplet_log_likelihood(emb, triplets, NoiseSchemeConfig("normalized", 1.0), k0)
    assert got == pytest.approx(expected, abs=1e-12)


def _simulated_triplets(emb, k_true, n, seed):
    rng = np.random.default_rng(seed)
    cfg = NoiseSchemeConfig("constant", k_true)
    out = []
    for _ in range(n):
        r, a, b = rng.choice(emb.n_items, size=3, replace=False)
        w = emb.items[r]
        pa, qa = emb.items[a], emb.items[b]
        av = 2.0 * (pa - qa)
        m = float(av @ w - (pa @ pa - qa @ qa))
        p0 = 1.0 / (1.0 + math.exp(-k_true * m))
        out.append(Triplet(int(r), int(a), int(b), 0 if rng.random() < p0 else 1))
    return out


def test_fit_k0_beats_a_coarse_grid():
    # grid-search oracle: the fitted point cannot lose to any grid candidate
    rng = np.random.default_rng(12)
    emb = Embedding(items=rng.standard_normal((25, 2)))
    triplets = _simulated_triplets(emb, k_true=3.0, n=400, seed=13)
    scheme = NoiseSchemeConfig("constant", 1.0)
    fitted = fit_k0(emb, triplets, scheme)
    ll_fit = triplet_log_likelihood(emb, triplets, scheme, fitted)
    grid = np.concatenate([np.linspace(0.0, 20.0, 401), [100.0, 1000.0, K_MAX]])
    ll_grid = max(triplet_log_likelihood(emb, triplets, scheme, k) for k in grid)
    assert ll_fit >= ll_grid - 1e-6
    assert 1.5 < fitted < 6.0  # recovers the right order of magnitude


def test_fit_k0_consistent_triplets_hit_the_upper_edge():
    emb = Embedding(items=HAND_ITEMS * 3.0)
    triplets = [Triplet(0, 1, 2, 0)] * 5  # noiseless, margin strongly positive
    fitted = fit_k0(emb, triplets, NoiseSchemeConfig("constant", 1.0))
    assert fitted > K_MAX - 0.05


def test_fit_k0_coin_flip_triplets_collapse_to_zero():
    # each triplet paired with its own negation makes LL exactly maximal at 0
    emb = Embedding(items=HAND_ITEMS)
    triplets = [Triplet(0, 1, 2, 0), Triplet(0, 1, 2, 1)] * 3
    fitted = fit_k0(emb, triplets, NoiseSchemeConfig("constant", 1.0))
    assert fitted < 0.05


def test_fit_k0_requires_triplets():
    with pytest.raises(ValueError):
        fit_k0(Embedding(items=HAND_ITEMS), [], NoiseSchemeConfig())


def test_fit_k0_invariant_to_triplet_order():
    rng = np.random.default_rng(21)
    emb = Embedding(items=rng.standard_normal((15, 2)))
    triplets = _simulated_triplets(emb, k_true=2.0, n=120, seed=22)
    scheme = NoiseSchemeConfig("constant", 1.0)
    k_fwd = fit_k0(emb, triplets, scheme)
    k_rev = fit_k0(emb, triplets[::-1], scheme)
    assert k_rev == pytest.approx(k_fwd, abs=0.02)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_prepared_margins_scale_invariance(seed):
    # preparing a uniformly scaled copy of a cloud gives identical items
    rng = np.random.default_rng(seed)
    items = rng.standard_normal((12, 2))
    try:
        base = prepare_embedding(Embedding(items=items))
    except DegenerateEmbeddingError:
        return
    scaled = prepare_embedding(Embedding(items=items * 17.0 + rng.normal(size=2)))
    np.testing.assert_allclose(scaled.items, base.items, atol=1e-8)
