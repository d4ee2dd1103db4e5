"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import combosim as cs


def test_version():
    assert cs.__version__


def test_poisson_arrivals_deterministic():
    a = cs.gen_poisson_arrivals(rate=1e6, duration=0.01, seed=7)
    b = cs.gen_poisson_arrivals(rate=1e6, duration=0.01, seed=7)
    assert a.dtype == np.int64
    assert np.array_equal(a, b)
    assert np.all(np.diff(a) > 0)
    mean_ns = np.diff(a).mean() / 1e3
    assert abs(mean_ns - 1000.0) < 4 * 1000.0 / math.sqrt(len(a))


def test_markov_bits_and_estimators_match_numpy():
    bits = cs.gen_markov_bits(b=0.05, a=0.0, n=200_000, seed=3)
    assert bits.dtype == np.uint8
    b, sigma = cs.bias(bits)
    assert b == pytest.approx(bits.mean() - 0.5, abs=1e-12)
    assert abs(b - 0.05) < 4 * sigma


def test_autocorr_alternating():
    bits = np.tile(np.array([0, 1], dtype=np.uint8), 50_000)
    ac = cs.autocorr(bits, k_max=2)
    assert ac[0]["lag"] == 1
    assert ac[0]["value"] == pytest.approx(-1.0, abs=1e-5)
    assert ac[1]["value"] == pytest.approx(1.0, abs=1e-5)


def test_predictions():
    assert cs.predict_f0(0.031, 24_000) == pytest.approx(1.2917e6, rel=1e-3)
    assert cs.predict_deadtime_autocorr(40_000, 1_000_000) == pytest.approx(
        math.exp(-0.04) - 1.0
    )
    pair = cs.propagate_pairxor(b=227e-6, a=-149e-6)
    assert pair["b"] == pytest.approx(74.4e-6, rel=0.01)
    b_c, a_c = cs.propagate_xor(-125e-6, 48e-6, 75e-6, 0.0)
    assert b_c == pytest.approx(1.875e-8)
    assert a_c < 2e-12
    assert cs.required_sample_size(7.1e-8, 3.7e-12, z=1.0) == pytest.approx(
        5.0e13, rel=0.02
    )


def test_simulate_nominal_point():
    r = cs.simulate(target_bits=200_000, seed=11)
    assert r["f_g"] == pytest.approx(8.0e6, rel=0.15)
    assert r["accepted"] + r["blanked"] > 0
    assert r["s"]["n_bits"] > r["c"]["n_bits"]
    assert abs(r["c"]["bias"]) < 8 * r["c"]["sigma_b"]
    again = cs.simulate(target_bits=200_000, seed=11)
    assert again["c"]["bias"] == r["c"]["bias"]


def test_simulate_returns_streams():
    r = cs.simulate(target_bits=50_000, seed=5, return_bits=True)
    s, y, t, c = r["bits_s"], r["bits_y"], r["bits_t"], r["bits_c"]
    assert len(y) == len(s) // 2
    assert len(c) == len(t)
    np.testing.assert_array_equal(y, s[: 2 * len(y) : 2] ^ s[1 : 2 * len(y) : 2])


def test_dead_detector_collapses_to_temporal():
    r = cs.simulate(f_d1=0.0, target_bits=20_000, seed=9, return_bits=True)
    assert r["bits_s"].sum() == 0
    np.testing.assert_array_equal(r["bits_c"], r["bits_t"])


def test_suite_and_bitfile_roundtrip(tmp_path):
    bits = cs.gen_markov_bits(b=0.0, a=0.0, n=400_000, seed=21)
    suite = cs.run_suite(bits, seq_len=100_000, serial_m=13)
    assert suite["sequences"] == 4
    assert suite["all_pass"]

    path = str(tmp_path / "bits.bin")
    cs.export_bits(bits[:1001], "packed", path)
    back = cs.import_bits(path, "packed")
    assert np.array_equal(back, bits[:1001])


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        cs.gen_poisson_arrivals(rate=-1.0, duration=1.0, seed=1)
    with pytest.raises(ValueError):
        cs.gen_markov_bits(b=0.4, a=-0.9, n=10, seed=1)
