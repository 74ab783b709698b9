# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import mmbeam


def test_steering_vector_unit_norm():
    g = mmbeam.steering_vector(16, 0.37)
    assert len(g) == 16
    assert math.isclose(sum(abs(z) ** 2 for z in g), 1.0, abs_tol=1e-12)


def test_codebook_structure():
    cb = mmbeam.build_codebook(32, 2, 2)
    assert cb.depth == 5
    assert [len(layer) for layer in cb.layers] == [1, 2, 4, 8, 16, 32]
    assert len(cb.oversample_layer) == 64
    assert mmbeam.children(cb, 1, 2) == [3, 4]
    with pytest.raises(ValueError):
        mmbeam.build_codebook(32, 3, 2)


def test_search_finds_an_on_grid_path():
    cb = mmbeam.build_codebook(32, 2, 2)
    aod = -1.0 + (2 * 40 - 1) / 64.0
    aoa = -1.0 + (2 * 12 - 1) / 64.0
    h = mmbeam.channel_from_paths(
        [mmbeam.make_path(1.0 + 0.0j, math.acos(aod), math.acos(aoa))], 32, 32
    )
    rng = mmbeam.Rng(1)
    result = mmbeam.hierarchical_search(h, cb, cb, 1, 2, 1.0, rng, True)
    assert result.pairs == [(12, 40)]
    assert result.measurements_used == 16 + 12 + 4
    assert mmbeam.success_decision(result, h, 2, 1)


def test_channel_matrix_shape_and_energy():
    rng = mmbeam.Rng.from_stream(7, 0)
    h = mmbeam.generate_channel(32, 16, 4, rng)
    m = h.matrix
    assert m.shape == (16, 32)
    assert np.isfinite(m).all()


def test_waterfill_and_rate_bound():
    q = mmbeam.waterfill([2.0, 2.0], 6.0)
    assert q == pytest.approx([3.0, 3.0])
    h = mmbeam.channel_from_paths([mmbeam.make_path(1.0, 0.9, 1.8)], 32, 32)
    assert mmbeam.rate_bound(h, 1, 10.0) == pytest.approx(math.log2(1 + 10.0 * 1024))


def test_time_costs_match_reference_values():
    cfg = mmbeam.SimConfig()
    cfg.n_a = cfg.m_a = 32
    cfg.n_r = cfg.m_r = 4
    cfg.n_s = 3
    cfg.k = 2
    cfg.i_ly = 2
    assert mmbeam.time_cost_hierarchical(cfg) == 24
    assert mmbeam.time_cost_sequential(cfg) == 256
    assert mmbeam.time_cost_sparse(cfg) == pytest.approx(158.94135, abs=1e-4)


def test_success_sweep_is_deterministic():
    cfg = mmbeam.SimConfig()
    cfg.n_s = 1
    cfg.l = 1
    cfg.trials = 25
    cfg.snr_db_grid = [30.0]
    cfg.master_seed = 5
    rows1 = mmbeam.run_success_sweep(cfg, 1)
    rows2 = mmbeam.run_success_sweep(cfg, 2)
    assert rows1[0].success_rate == rows2[0].success_rate
    assert rows1[0].success_rate >= 0.9
    csv = mmbeam.success_csv(rows1)
    assert csv.startswith("snr_db,n_s,k,i_ly,success_rate,ci95_halfwidth,trials\n")


def test_validation_reports_violations():
    cfg = mmbeam.SimConfig()
    cfg.n_s = 5
    problems = mmbeam.validate(cfg)
    assert any("min(n_r, m_r)" in p for p in problems)
