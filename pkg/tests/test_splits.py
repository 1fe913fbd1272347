"""Histogram reweighting and homophily-stratified train/val/test splits."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homshift import (
    EXCLUDED,
    TEST,
    TRAIN,
    VAL,
    HomophilyHistogram,
    bin_index,
    concentrate,
    invert,
    load_split,
    save_split,
    save_split_diagnostics,
    split_diagnostics,
    stratified_split,
)


@pytest.fixture(scope="module")
def beta_ratios():
    return np.random.default_rng(5).beta(10.0, 3.0, size=10_000)


# ----------------------------------------------------------- reweighting


def test_concentrate_gamma_one_is_identity():
    h = HomophilyHistogram(3, np.array([0.2, 0.3, 0.5]))
    assert np.allclose(concentrate(h, 1.0).mass, h.mass, atol=1e-15)


def test_concentrate_gamma_zero_flattens_but_keeps_zeros():
    h = HomophilyHistogram(3, np.array([0.8, 0.2, 0.0]))
    assert np.allclose(concentrate(h, 0.0).mass, [0.5, 0.5, 0.0], atol=1e-15)


def test_concentrate_hand_values():
    h = HomophilyHistogram(2, np.array([0.8, 0.2]))
    assert np.allclose(concentrate(h, 3.0).mass, [64 / 65, 1 / 65], atol=1e-12)
    h2 = HomophilyHistogram(3, np.array([0.5, 0.25, 0.25]))
    assert np.allclose(concentrate(h2, 2.0).mass, [2 / 3, 1 / 6, 1 / 6], atol=1e-12)


def test_concentrate_rejects_negative_gamma():
    h = HomophilyHistogram(2, np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        concentrate(h, -0.5)


def test_invert_uniform_is_fixed_point():
    h = HomophilyHistogram(4, np.full(4, 0.25))
    assert np.allclose(invert(h).mass, h.mass, atol=1e-15)


def test_invert_hand_values_and_zeros():
    h = HomophilyHistogram(3, np.array([0.2, 0.3, 0.5]))
    assert np.allclose(invert(h).mass, [15 / 31, 10 / 31, 6 / 31], atol=1e-12)
    hz = HomophilyHistogram(3, np.array([0.5, 0.0, 0.5]))
    assert np.allclose(invert(hz).mass, [0.5, 0.0, 0.5], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=2, max_size=8))
def test_invert_is_involution(weights):
    mass = np.asarray(weights) / np.sum(weights)
    h = HomophilyHistogram(mass.size, mass)
    assert np.allclose(invert(invert(h)).mass, h.mass, atol=1e-12)


# ------------------------------------------------------- split structure


def test_split_partitions_and_sizes(beta_ratios):
    ratios = beta_ratios.copy()
    ratios[:100] = np.nan
    a = stratified_split(ratios, 1.0, 10, seed=9)

    assert a.tags.shape == ratios.shape
    assert set(np.unique(a.tags)) <= {TRAIN, VAL, TEST, EXCLUDED}
    assert np.array_equal(a.mask(EXCLUDED), np.isnan(ratios))

    valid = int((~np.isnan(ratios)).sum())
    pool = int(a.mask(TRAIN).sum() + a.mask(VAL).sum())
    assert pool == round(0.8 * valid)
    assert int(a.mask(VAL).sum()) == round(0.2 * pool)
    assert int(a.mask(TEST).sum()) == valid - pool


def test_split_gamma_zero_is_flat(beta_ratios):
    a = stratified_split(beta_ratios, 0.0, 10, seed=2)
    assert a.emd_train_test < 0.01

    n_b = np.bincount(bin_index(beta_ratios, 10), minlength=10)
    for count, share in zip(n_b, a.per_bin_train_share):
        if count >= 50:
            # integer quotas keep each populated bin within a node or two of 0.8
            assert abs(share - 0.8) <= 2.0 / count
        if count == 0:
            assert share == 0.0


def test_split_deterministic(beta_ratios):
    ratios = beta_ratios.copy()
    ratios[::97] = np.nan
    a = stratified_split(ratios, 2.0, 10, seed=7)
    b = stratified_split(ratios, 2.0, 10, seed=7)
    assert np.array_equal(a.tags, b.tags)
    assert a.emd_train_test == b.emd_train_test
    assert np.array_equal(a.per_bin_train_share, b.per_bin_train_share)


def test_split_two_bin_disjointness_grows_with_gamma():
    # 20/80 mass over two bins: the concentrated weight lands entirely on
    # each bin's own share, so train/test separation rises with gamma
    ratios = np.concatenate([np.full(2000, 0.1), np.full(8000, 0.9)])
    emds = [stratified_split(ratios, g, 2, seed=4).emd_train_test
            for g in (0.0, 1.0, 2.0, 3.0)]
    assert emds[0] == pytest.approx(0.0, abs=1e-12)
    assert all(lo < hi for lo, hi in zip(emds, emds[1:]))


def test_split_gamma_shifts_more_than_flat(beta_ratios):
    flat = stratified_split(beta_ratios, 0.0, 10, seed=2).emd_train_test
    skew = stratified_split(beta_ratios, 3.0, 10, seed=2).emd_train_test
    assert skew > flat


def test_split_input_validation(beta_ratios):
    with pytest.raises(ValueError, match="nonempty"):
        stratified_split(np.array([]), 1.0, 10, seed=0)
    with pytest.raises(ValueError, match="defined ratio"):
        stratified_split(np.full(50, np.nan), 1.0, 10, seed=0)
    with pytest.raises(ValueError, match="train_frac"):
        stratified_split(beta_ratios, 1.0, 10, seed=0, train_frac=1.0)
    with pytest.raises(ValueError, match="val_frac"):
        stratified_split(beta_ratios, 1.0, 10, seed=0, val_frac=-0.1)


# ------------------------------------------------------------ round trip


def test_split_save_load_roundtrip(tmp_path, beta_ratios):
    ratios = beta_ratios.copy()
    ratios[:10] = np.nan
    a = stratified_split(ratios, 1.5, 10, seed=11)
    path = tmp_path / "split.csv"
    save_split(a, path)
    assert np.array_equal(load_split(path), a.tags)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "node_id,split"
    assert lines[1] == "0,excluded"
    assert len(lines) == ratios.size + 1


def test_load_split_rejects_malformed(tmp_path):
    bad_header = tmp_path / "a.csv"
    bad_header.write_text("node,tag\n0,train\n")
    with pytest.raises(ValueError, match="node_id,split"):
        load_split(bad_header)

    gap = tmp_path / "b.csv"
    gap.write_text("node_id,split\n0,train\n2,test\n")
    with pytest.raises(ValueError, match="consecutive"):
        load_split(gap)

    unknown = tmp_path / "c.csv"
    unknown.write_text("node_id,split\n0,sideways\n")
    with pytest.raises(ValueError, match="unknown split tag"):
        load_split(unknown)


def test_split_diagnostics_payload(tmp_path, beta_ratios):
    a = stratified_split(beta_ratios, 2.0, 10, seed=3)
    diag = split_diagnostics(a)
    assert diag["gamma"] == 2.0
    assert diag["emd_train_test"] == a.emd_train_test
    assert diag["per_bin_train_share"] == [float(s) for s in a.per_bin_train_share]

    path = tmp_path / "diag.json"
    save_split_diagnostics(a, path)
    text = path.read_text(encoding="utf-8")
    assert json.loads(text) == diag
    assert text.index('"emd_train_test"') < text.index('"gamma"')
