import math

import numpy as np
import pytest

from spintwist import experiments as ex
from spintwist.metrology import qfi_optimal
from spintwist.models import h_oat
from spintwist.spin import build_system, x_polarized


def test_find_qfi_peak_on_oat():
    s = build_system(20)
    t, f = ex.find_qfi_peak(h_oat(s, 1.0), x_polarized(s), 0.5, 2.0)
    assert t == pytest.approx(math.pi / 2, abs=1e-6)
    assert f == pytest.approx(400, rel=1e-9)


def test_qfi_curve_starts_at_sql():
    s = build_system(16)
    f = ex.qfi_curve(h_oat(s, 1.0), x_polarized(s), [0.0, 0.1])
    assert f[0] == pytest.approx(16)
    assert f[1] > 16


def test_xyz_peak_and_state():
    t, f = ex.xyz_peak(30)
    assert 0.5 * math.log(30) / 30 < t < 2 * math.log(30) / 30
    assert qfi_optimal(ex.xyz_state(30, t)).qfi == pytest.approx(f, rel=1e-9)


def test_floquet_curve_times():
    times, f = ex.floquet_qfi_curve(20, 0.4, 5)
    np.testing.assert_allclose(np.diff(times), 3 * 2 * 0.4 / 20)
    assert f[0] == pytest.approx(20)


def test_decoherence_cell_zero_gamma_is_closed_system():
    r = ex.decoherence_cell(10, 0.0)
    assert r["qfi_oat"] == pytest.approx(100, rel=1e-9)
    assert r["ratio"] == pytest.approx(r["qfi_fd"] / r["qfi_oat"])


def test_loss_curves_structure():
    c = ex.loss_curves(12, 3, fractions=(1.0, 0.5))
    assert list(c) == ["delta_n", "ghz", "xyz_1tc", "xyz_0.5tc"]
    assert c["ghz"][0] == pytest.approx(144)
    assert c["ghz"][1] == pytest.approx(11)
    assert all(len(v) == 4 for v in c.values())


def test_tnt_vs_xyz_keys():
    r = ex.tnt_vs_xyz(20)
    assert set(r) == {"tnt", "xyz"}
    for v in r.values():
        assert 0 <= v["central"] <= 1 and 0 <= v["poles"] <= v["poles2"] <= 1
