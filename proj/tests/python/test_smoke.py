import math

import numpy as np
import pytest

import carrystate as cs


def test_version_and_families():
    assert cs.__version__ == "0.1.0"
    assert "incomp_ns" in cs.families()


def test_quantizer_roundtrip():
    assert cs.quantize(0.1, 2, 1.0) == 2
    assert cs.dequantize(2, 2, 1.0) == pytest.approx(0.25)


def test_sample_and_roundtrip():
    u = cs.sample_family("incomp_ns", 32, 5)
    assert u.shape == (2, 32, 32)
    dec, bits = cs.roundtrip(u, 16, [6])
    assert dec.shape == u.shape
    assert bits == 2 * 6 * 16 * 16
    m = cs.detail_values(dec, u, 16)
    assert 0 < m["expr_rel"] < 1


def test_theory_closed_forms():
    rho = cs.rho_hf(4.0, 0.5, 3.0, 40.0)
    assert rho == pytest.approx(3.0 / 99.0)
    eq = cs.dq_exact(2, [4, 4], 4.0, 0.5, 3.0, 40.0, 4.0)
    assert eq == pytest.approx(cs.dq_lower_bound(2, 8.0, 4.0, 0.5, 3.0, 40.0, 4.0))
    pd = cs.phase_diagram([0, 4, 8, 12], [2, 4])
    assert len(pd["value"]) == 2 and len(pd["contour"]) > 0


def test_field_file(tmp_path):
    f = np.arange(2 * 8, dtype=float).reshape(2, 8)
    p = str(tmp_path / "f.fld")
    cs.write_field(p, f)
    assert np.array_equal(cs.read_field(p), f)


def test_errors_surface():
    with pytest.raises(cs.CarrystateError):
        cs.sample_family("navier", 16, 1)
    with pytest.raises(cs.CarrystateError):
        cs.quantize(math.nan, 4, 1.0)


def test_small_ladder():
    rows = cs.ladder("advection", samples=8, calib_samples=8, n_fine=64, horizon=False)
    assert [r["label"] for r in rows] == ["Primitive", "BestSingleDerived", "DerivBase", "DerivOpt"]
