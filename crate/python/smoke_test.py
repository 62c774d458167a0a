"""Smoke test for the relkac extension: `pip install --no-build-isolation .` then `pytest python/`."""

import math

import pytest

import relkac


def test_special_functions():
    assert relkac.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-12)
    assert relkac.levy_density(1.0, mass=0.0) == pytest.approx(1 / math.pi, rel=1e-12)
    assert relkac.free_kernel(0.0, 1.0, mass=0.0) == pytest.approx(1 / math.pi, rel=1e-12)
    assert relkac.relativistic_symbol(math.sqrt(3.0)) == pytest.approx(1.0)
    assert relkac.subordinator_laplace(1.5, 1.0) == pytest.approx(math.exp(-1.0))
    assert relkac.subordinator_density(1.0, 1.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    v = relkac.char_exponent(1.0, mass=0.0)
    assert abs(v - (1 - 1j)) < 1e-12


def test_domain_errors_are_value_errors():
    with pytest.raises(ValueError):
        relkac.bessel_k(1.0, -1.0)
    with pytest.raises(ValueError):
        relkac.estimate("h9", [0.0], 0.5)
    with pytest.raises(ValueError):
        relkac.estimate("h1", [0.0], 0.5, field_spec={"vector": {"family": "nope"}})


def test_estimate_matches_lattice_oracle():
    field = {"vector": {"family": "tanh", "amplitude": 1.0, "scale": 1.0}}
    params = {"n_paths": 20000, "n_slices": 16, "control_slices": 0}
    rep = relkac.estimate("h2", [0.2], 0.3, field_spec=field, params=params, seed=5)
    again = relkac.estimate("h2", [0.2], 0.3, field_spec=field, params=params, seed=5)
    assert rep["value"] == again["value"]
    mean = complex(rep["value"]["mean_re"], rep["value"]["mean_im"])
    se = math.hypot(rep["value"]["stderr_re"], rep["value"]["stderr_im"])
    oracle = relkac.lattice_oracle("h2", [0.2], 0.3, 256, 16.0, field_spec=field)
    assert abs(mean - oracle) < 4 * se + 1e-3
