"""Smoke tests for the python bindings."""

import math
import os
import sys

import pytest

# when run from the build tree, the extension lives next to the sources
ext_dir = os.environ.get("MFLAB_EXT_DIR")
if ext_dir:
    sys.path.insert(0, ext_dir)
    import _mflab as mf
else:
    import mflab as mf


def test_generators_and_counts():
    f = mf.two_exponent(alpha=0.5, beta=1.0, eta=0.5, jmax=12)
    vals = f.values(10)
    assert len(vals) == 1024
    assert sum(1 for v in vals if abs(v - 2.0 ** -5) < 1e-12) == 32
    assert f.construction == "two_exponent"

    with pytest.raises(ValueError):
        mf.two_exponent(alpha=1.0, beta=0.5, eta=0.5, jmax=8)


def test_leaders_and_holder():
    f = mf.slow_oscillation(alpha=0.5, beta=1.0, jmax=16)
    lf = mf.compute_leaders(f)
    assert all(abs(v - 2.0 ** -4) < 1e-12 for v in lf.values(5))
    est = mf.holder_estimate(0.37, lf, 8, 16)
    assert abs(est["hhat"] - 0.5) < 0.05


def test_large_deviation_and_oracle_verdict():
    f = mf.two_exponent(alpha=0.5, beta=1.0, eta=0.5, jmax=14)
    lf = mf.compute_leaders(f)
    cfg = mf.EstimatorConfig()
    cfg.j1, cfg.j2 = 6, 13
    cfg.h_grid = [0.4, 0.5, 0.75, 1.0, 1.1]
    rho = mf.large_deviation([lf], cfg)["rho"]
    assert abs(rho.values[1] - 0.5) < 0.1
    assert rho.values[3] > 0.95
    assert rho.values[2] == -math.inf

    orc = mf.oracle(
        construction="two_exponent", alpha=0.5, beta=1.0, eta=0.5, h_grid=cfg.h_grid
    )
    assert orc["failure_gap"] > 0.4
    rep = mf.compare(rho, orc["D"], tol=0.1)
    assert rep["verdict"] == "INVALID"
    assert rep["sup_distance"] > 0.4


def test_lacunary_reproducibility():
    a = mf.lws_cantor(1, 3, 0.5, 0.4, 99, 10)
    b = mf.lws_cantor(1, 3, 0.5, 0.4, 99, 12)
    for j in range(11):
        assert a.values(j) == b.values(j)


def test_genspace_roundtrip(tmp_path):
    seq = mf.make_oscillating(0.5, 1.0, 1 << 14)
    lo, hi = mf.boyd_indices(seq)
    assert abs(lo - 0.5) <= 0.05
    assert abs(hi - 1.0) <= 0.05

    f = mf.two_exponent(alpha=0.5, beta=1.0, eta=0.5, jmax=10)
    dyadic = mf.make_oscillating(0.5, 0.5, 64)  # sigma_j = 2^{j/2} exactly
    assert abs(mf.lambda_sigma_norm(f, dyadic) - 1.0) < 1e-9
    proj = mf.cn_project(f, dyadic, 3)
    assert mf.leadersuite_check(proj, dyadic) >= 1.0

    path = str(tmp_path / "f.mfld")
    mf.write_field(path, f)
    g = mf.read_field(path)
    assert g.values(10) == f.values(10)


def test_dyadic_counts():
    assert mf.duplicated_gamma_j_count(8) == 64
    assert mf.r_j_count(8) == 16
    assert abs(mf.cantor_dimension(1, 4) - 0.5) < 1e-12
    assert abs(mf.asymmetric_cantor_dimension() - math.log2((1 + 5 ** 0.5) / 2)) < 1e-12
