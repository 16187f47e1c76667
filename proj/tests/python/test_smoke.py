import math
import os

import numpy as np
import pytest

import dyadic


def test_field_round_trip():
    grid = dyadic.Grid(1, 64)
    f = dyadic.random_band_limited(grid, 1, 20, seed=3)
    g = dyadic.Field.from_samples(grid, f.samples)
    assert dyadic.l2_norm(g - f) < 1e-13
    assert f.samples.shape == (64,)
    assert dyadic.Grid(2, 16) == dyadic.Field.zero(dyadic.Grid(2, 16)).grid


def test_mode_norm_matches_numpy():
    grid = dyadic.Grid(1, 128)
    f = dyadic.Field.mode(grid, [7])
    x = np.arange(128) / 128 - 0.5
    assert np.allclose(f.samples, np.exp(2j * np.pi * 7 * x))
    assert dyadic.norm(f, "Lebesgue(p=2)") == pytest.approx(1.0)


def test_product_symbol():
    grid = dyadic.Grid(1, 32)
    f = dyadic.random_band_limited(grid, 0, 15, seed=1, mean_zero=False)
    g = dyadic.random_band_limited(grid, 0, 15, seed=2, mean_zero=False)
    out = dyadic.apply_direct("one", f, g)
    ref = np.asarray(f.refined(2).samples) * np.asarray(g.refined(2).samples)
    assert np.allclose(out.samples, ref, atol=1e-12)


def test_errors_are_typed():
    grid = dyadic.Grid(1, 16)
    one = dyadic.Field.mode(grid, [0])
    with pytest.raises(dyadic.NumericDomainError):
        dyadic.apply_direct("inverse_gamma(2)", one, one)
    with pytest.raises(dyadic.ConfigError):
        dyadic.run_config("kind: leibniz\np1: 4\np2: 3\n")


def test_budget_and_coefficients():
    assert dyadic.derivative_budget(1, 2, 2, 2, 2) == 6
    c = dyadic.paraproduct_coefficients("one", dyadic.Grid(1, 32), a_max=2)
    assert c["A"] == 2 and c["slabs"]


def test_lemma_config_runs():
    path = os.path.join(os.environ.get("DYADIC_CONFIG_DIR", "configs"), "lemmas.yaml")
    (report,) = dyadic.run_config_file(path, grid=128)
    assert report["passed"]
    assert math.isclose(report["single_entry_ratio"], 2.0, rel_tol=0, abs_tol=1e-12)
