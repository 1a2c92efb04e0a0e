import math

import numpy as np
import pytest

import wpdyn


def test_free_spreading():
    tr = wpdyn.solve(wpdyn.system("free"), wpdyn.Packet(0.0, 1.0, 1.0), 2.0, sample_every=500)
    t = tr["t"]
    np.testing.assert_allclose(tr["alpha"] ** 2, 1.0 + t**2, rtol=1e-12)
    np.testing.assert_allclose(tr["det_M"], 1.0, atol=1e-12)
    np.testing.assert_allclose(tr["I_L"], 0.5, rtol=1e-10)


def test_moments_and_wavefunction():
    sys = wpdyn.system("constant", omega=1.0)
    vx, vp, corr = wpdyn.moments(sys, wpdyn.Packet(0.0, 1.0, 1.0), 1.0)
    assert vx == pytest.approx(0.5)
    assert vp == pytest.approx(0.5)
    assert abs(corr) < 1e-10
    x = np.linspace(-10, 10, 512, endpoint=False)
    psi = wpdyn.wavefunction(sys, wpdyn.Packet(0.0, 1.0, 1.0), 1.0, x)
    assert np.sum(np.abs(psi) ** 2) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-10)


def test_kernel_and_wigner():
    k = wpdyn.kernel(0.0, 1.0, -1.0, 0.0, 0.5, 2.0)
    assert k == pytest.approx(np.sqrt(1 / (2j * math.pi)) * np.exp(1j))
    assert max(wpdyn.kernel_residuals(1.3, 0.9, (1.3 * 0.6 - 1) / 0.9, 0.6)) < 1e-5
    with pytest.raises(wpdyn.CapabilityError):
        wpdyn.kernel(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    x = np.linspace(-10, 10, 512, endpoint=False)
    psi = wpdyn.wavefunction(wpdyn.system("free"), wpdyn.Packet(0.0, 0.0, 1.0), 0.0, x)
    ax = np.linspace(-4, 4, 64, endpoint=False)
    w = wpdyn.wigner(x, psi, ax, ax)
    X, P = np.meshgrid(ax, ax)
    np.testing.assert_allclose(w, np.exp(-X**2 - P**2) / math.pi, atol=1e-6)


def test_split_step_matches_analytic():
    sys = wpdyn.system("constant", omega=1.0)
    pk = wpdyn.Packet(0.0, 1.0, 2.0)
    x = np.linspace(-20, 20, 1024, endpoint=False)
    psi0 = wpdyn.wavefunction(sys, pk, 0.0, x)
    out = wpdyn.split_step(sys, x, psi0, 1e-3, 1000)
    ref = wpdyn.wavefunction(sys, pk, 1.0, x)
    overlap = np.vdot(ref, out)
    err = np.sqrt(np.sum(np.abs(out - overlap / abs(overlap) * ref) ** 2) * (x[1] - x[0]))
    assert err < 1e-5


def test_scenarios(tmp_path):
    assert "free-spread" in wpdyn.builtin_scenarios()
    report = wpdyn.run_scenario("frozen-width-demo", tmp_path)
    assert report["summary"]["pass"]
    assert report["frozen_width"]["flag"] == "NON-CANONICAL"
    assert (tmp_path / "trajectory.csv").exists()
    with pytest.raises(wpdyn.ConfigError):
        wpdyn.run_scenario({"system": {"type": "free"}})
