"""Covering-step simulator: codebooks, success rates, sweeps."""

import math

import numpy as np
import pytest

from crcc.binning import (
    Codebook,
    CodebookTooLarge,
    SimConfig,
    encode_feasibility,
    exhaustive_success,
    generate_codebooks,
    layer_threshold,
    threshold_sweep,
)
from crcc.families import random_form2_spec
from crcc.probability import build_joint

from conftest import bsc_chain_pmf


def cfg(**kw):
    base = dict(n=8, trials=50, eps=1.0, seed=11, which="w2_bin",
                pre_bin_rate=1.0, bin_rate=0.5)
    base.update(kw)
    return SimConfig(**base)


class TestSimConfig:
    def test_counts(self):
        c = cfg(n=8, pre_bin_rate=1.0, bin_rate=0.5)
        assert c.num_words == 256
        assert c.num_bins == 16

    @pytest.mark.parametrize("bad", [
        dict(n=0), dict(trials=0), dict(eps=0.0), dict(which="w3_bin"),
        dict(pre_bin_rate=0.4, bin_rate=0.5), dict(bin_rate=-0.1),
    ])
    def test_invalid_rejected(self, bad):
        with pytest.raises((ValueError, CodebookTooLarge)):
            cfg(**bad)

    def test_codebook_cap(self):
        with pytest.raises(CodebookTooLarge):
            cfg(n=30, pre_bin_rate=1.0)


class TestGenerateCodebooks:
    def test_shape_and_bins(self):
        pmf = bsc_chain_pmf()
        cb = generate_codebooks(pmf, cfg())
        assert cb.words.shape == (256, 8)
        assert cb.bin_of.shape == (256,)
        assert cb.bin_of.max() < 16

    def test_equal_rates_unit_mean_occupancy(self):
        pmf = bsc_chain_pmf()
        c = cfg(pre_bin_rate=0.5, bin_rate=0.5)
        cb = generate_codebooks(pmf, c)
        counts = np.bincount(cb.bin_of, minlength=c.num_bins)
        assert counts.sum() == c.num_words
        assert counts.mean() == pytest.approx(1.0)

    def test_deterministic_under_seed(self):
        pmf = bsc_chain_pmf()
        a = generate_codebooks(pmf, cfg())
        b = generate_codebooks(pmf, cfg())
        assert np.array_equal(a.words, b.words)
        assert np.array_equal(a.bin_of, b.bin_of)

    def test_uniform_marginal_frequency(self):
        # W2 is an even mixture of two symmetric conditionals -> p(w2) = 1/2
        pmf = bsc_chain_pmf()
        cb = generate_codebooks(pmf, cfg(seed=5))
        k = cb.words.size
        freq = cb.words.mean()
        sigma = math.sqrt(0.25 / k)
        assert abs(freq - 0.5) <= 3 * sigma

    def test_bin_members_lookup(self):
        cb = Codebook(words=np.arange(8).reshape(4, 2) % 2,
                      bin_of=np.array([0, 1, 0, 1]), num_bins=2)
        assert len(cb.bin_members(0)) == 2


class TestEncodeFeasibility:
    def test_rate_in_unit_interval_and_deterministic(self):
        pmf = bsc_chain_pmf()
        c = cfg(trials=100)
        rate = encode_feasibility(pmf, c)
        assert 0.0 <= rate <= 1.0
        assert encode_feasibility(pmf, c) == rate

    def test_empty_bins_are_failures_not_crashes(self):
        # one word, many bins: the addressed bin is almost always empty
        pmf = bsc_chain_pmf()
        c = cfg(n=8, trials=200, pre_bin_rate=1.0, bin_rate=1.0, eps=3.0)
        rate = encode_feasibility(pmf, c)
        assert 0.0 <= rate < 1.0

    def test_matches_exact_occupancy_oracle(self):
        pmf = bsc_chain_pmf()
        thr = layer_threshold(pmf, "w2_bin")
        c = cfg(n=8, trials=3000, eps=1.0,
                pre_bin_rate=0.25 + thr + 0.5, bin_rate=0.25, seed=42)
        mc = encode_feasibility(pmf, c)
        exact = exhaustive_success(pmf, c)
        assert 0.1 < exact < 0.99  # a non-degenerate operating point
        assert abs(mc - exact) <= 0.05

    def test_other_layers_run(self, rng):
        pmf = build_joint(random_form2_spec(rng))
        for which in ("u1_bin", "u2_bin"):
            c = cfg(n=6, trials=30, eps=2.0, which=which,
                    pre_bin_rate=1.2, bin_rate=0.3)
            assert 0.0 <= encode_feasibility(pmf, c) <= 1.0


class TestExhaustiveOracle:
    def test_enumeration_cap(self):
        pmf = bsc_chain_pmf()
        with pytest.raises(CodebookTooLarge):
            exhaustive_success(pmf, cfg(n=21, trials=1, pre_bin_rate=1.0))

    def test_deterministic(self):
        pmf = bsc_chain_pmf()
        c = cfg(trials=50)
        assert exhaustive_success(pmf, c) == exhaustive_success(pmf, c)


class TestThresholdSweep:
    def test_layer_threshold_value(self):
        q = 0.105
        h = -(q * math.log2(q) + (1 - q) * math.log2(1 - q))
        assert layer_threshold(bsc_chain_pmf(q), "w2_bin") == pytest.approx(
            1 - h, abs=1e-12)

    def test_equal_margins_constant_curve(self):
        pmf = bsc_chain_pmf()
        base = cfg(n=8, trials=40)
        curve = threshold_sweep(pmf, base, [0.25, 0.25, 0.25])
        rates = {s for _, s in curve}
        assert len(rates) == 1

    def test_unsorted_margins_rejected(self):
        with pytest.raises(ValueError):
            threshold_sweep(bsc_chain_pmf(), cfg(), [0.5, 0.0])

    def test_monotone_within_noise(self):
        pmf = bsc_chain_pmf()
        base = cfg(n=16, trials=150, eps=0.8, bin_rate=0.25, seed=7,
                   pre_bin_rate=1.0)
        curve = threshold_sweep(pmf, base, [-0.5, 0.0, 0.5])
        rates = [s for _, s in curve]
        assert all(b >= a - 0.05 for a, b in zip(rates, rates[1:]))
