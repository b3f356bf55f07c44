from fractions import Fraction
from math import comb

import numpy as np
import pytest

from qswitch import experiments as ex
from qswitch.channels import pauli_channel, validate
from qswitch.linalg import KET0, KET_PLUS


@pytest.mark.parametrize("n", [1, 3, 6])
def test_simplex_grid_size_and_exactness(n):
    grid = ex.simplex_grid(n)
    assert len(grid) == comb(n + 3, 3)
    assert all(sum(p) == 1 and all(isinstance(v, Fraction) for v in p) for p in grid)
    with pytest.raises(ValueError):
        ex.simplex_grid(0)


def test_tolerance_profiles():
    assert set(ex.TOLERANCE_PROFILES) == {"default", "strict", "loose"}
    d = ex.TOLERANCE_PROFILES["default"].as_dict()
    assert d["choi"] == 1e-8 and d["coherent_info"] == 1e-6 and d["q"] == 1e-6


def test_half_xy_family_ground_truth(rng):
    assert ex.is_half_xy_family(pauli_channel((0, 0.5, 0.5, 0)), 1e-6)
    assert ex.is_half_xy_family(ex.conjugated_xy(0.5, rng), 1e-6)
    assert not ex.is_half_xy_family(ex.conjugated_xy(0.3, rng), 1e-6)
    assert not ex.is_half_xy_family(pauli_channel((0.5, 0.5, 0, 0)), 1e-6)


def test_random_qubit_channels_are_valid(rng):
    for _ in range(40):
        assert validate(ex.random_qubit_channel(rng)).ok


def test_probe_controls(rng):
    gs = ex.probe_controls(rng)
    assert len(gs) == 8
    assert np.allclose(gs[0], KET_PLUS) and np.allclose(gs[2], KET0)
    assert all(np.isclose(np.linalg.norm(g), 1) for g in gs)


def test_sweep_row_identity():
    row = ex.sweep_row(ex.simplex_grid(1)[0])
    assert row["p0"] == 1 and row["ic_clamped"] == 1 and row["eb"] == 0 and row["q2way_lower"] == 1


def test_paths_experiment_presets():
    for name in ex.PATH_PRESETS:
        res, ok = ex.paths(ex.path_preset(name))
        assert ok, name
    with pytest.raises(KeyError):
        ex.path_preset("bogus")


def test_small_uniqueness_and_nogo():
    res, ok = ex.uniqueness(40, 5, seed=1)
    assert ok and res["maximal"] >= 5
    res, ok = ex.nogo(3, (2,), seed=1)
    assert ok and res["certified"] == 3
