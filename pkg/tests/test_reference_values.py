"""Worked reference values for individual operations, each checked against an
independent evaluation (closed form, brute force or literal construction)."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from oracles import dicke_isometry, partial_trace_last, qfi_bures
from spintwist import experiments as ex
from spintwist.analysis import SphereGrid, fit_power_law, husimi_q, parity_sector_weights
from spintwist.floquet import (
    bch_residual, effective_coupling, effective_hamiltonian, period_propagator, periods_for_time, tau_from_alpha,
)
from spintwist.loss import lose_one
from spintwist.metrology import (
    ghz_like_coefficients, parity_closed_form, parity_curve, parity_expectation, qfi_mixed, qfi_optimal, qfi_pure,
    sensitivity, to_quantization_axis,
)
from spintwist.models import h_cavity_oat, h_oat, h_tat, h_tnt, h_xyz
from spintwist.propagate import UnitaryEvolver, evolve_lindblad, superradiance
from spintwist.semiclassical import critical_time, floquet_critical_time, integrate_trajectory, mean_field_flow
from spintwist.spin import (
    BlochAngles, DensityMatrix, aghz_state, build_system, coherent_amplitudes, dicke_state, ghz_state,
    rotation_matrix, x_polarized,
)


def _xyz(n, t, chi=1.0):
    return ex.xyz_state(n, t, chi)


def _tc(n):
    return critical_time(n)["approx"]


# states

def test_two_spin_equatorial_coherent_state():
    np.testing.assert_allclose(coherent_amplitudes(build_system(2), math.pi / 2, 0.0), [0.5, 1 / math.sqrt(2), 0.5])


def test_aghz_four_spins():
    np.testing.assert_allclose(aghz_state(build_system(4)).amplitudes, [0.5, 0.5, 0, 0.5, 0.5])


# models

def test_one_spin_tat_and_xyz_vanish():
    s = build_system(1)
    np.testing.assert_allclose(h_tat(s, 1.0).matrix, 0, atol=1e-15)
    np.testing.assert_allclose(h_xyz(s, 1.0).matrix, 0, atol=1e-15)
    np.testing.assert_allclose(effective_hamiltonian(s, 1.0, 0.1).matrix, 0, atol=1e-15)


def test_tat_as_difference_of_two_twists():
    s = build_system(10)
    a = s.op(BlochAngles(math.pi / 4, math.pi / 2))
    b = s.op(BlochAngles.wrapped(math.pi / 4, -math.pi / 2))
    np.testing.assert_allclose(0.8 * (a @ a - b @ b), h_tat(s, 0.8).matrix, atol=1e-12)


def test_xyz_cyclic_form_and_parity_commutator():
    s = build_system(10)
    alt = 2 / 10 * (s.jy @ s.jx @ s.jz + s.jz @ s.jx @ s.jy)
    np.testing.assert_allclose(alt, h_xyz(s, 1.0).matrix, atol=1e-12)
    s50 = build_system(50)
    h = h_xyz(s50, 1.0).matrix
    p = np.diag((-1.0) ** np.arange(51))
    np.testing.assert_allclose(h @ p - p @ h, 0, atol=1e-12)


def test_tnt_trace_and_default_drive():
    h = h_tnt(build_system(2), 1.0, 1.0)
    assert np.trace(h.matrix).real == pytest.approx(2)
    assert h_tnt(build_system(100), 1.0).params["omega"] == 50


def test_cavity_oat_two_spins():
    np.testing.assert_allclose(h_cavity_oat(build_system(2), 1.0).matrix, np.diag([1, 2, 1]))


def test_xyz_ladder_form_twenty_spins():
    from spintwist.models import h_xyz_from_elements

    s = build_system(20)
    np.testing.assert_allclose(h_xyz_from_elements(s, 1.0), h_xyz(s, 1.0).matrix, atol=1e-10)


# propagation

def test_oat_revival_after_two_pi():
    s = build_system(12)
    psi = x_polarized(s)
    out = UnitaryEvolver(h_oat(s, 1.0)).evolve(psi, 2 * math.pi)
    assert abs(np.vdot(psi.amplitudes, out.amplitudes)) > 1 - 1e-9


def test_pulse_conjugation_turns_z_twist_into_x_twist():
    s = build_system(8)
    r_minus, r_plus = rotation_matrix(s, "y", -math.pi / 2), rotation_matrix(s, "y", math.pi / 2)
    np.testing.assert_allclose(r_minus @ h_oat(s, 1.0).matrix @ r_plus, s.jx @ s.jx, atol=1e-12)


def test_superradiant_decay_from_top_state():
    s = build_system(10)
    traj = evolve_lindblad(h_oat(s, 0.0), [superradiance(s, 0.2)], dicke_state(s, 5), np.linspace(0, 2, 21))
    jz = np.array([st.expect(s.jz).real for st in traj.states])
    assert np.all(np.diff(jz) < 0)
    # d<Jz>/dt at t=0 is -Gamma/2 <J+J-> = -Gamma/2 * 2j = -Gamma j
    assert (jz[1] - jz[0]) / 0.1 == pytest.approx(-0.2 * 5, rel=0.1)


# floquet

def test_floquet_reference_numbers():
    tau = tau_from_alpha(100, 1.0, 0.4)
    assert tau == pytest.approx(0.008)
    t = floquet_critical_time(100, 0.4)
    assert t == pytest.approx(0.34539, abs=1e-5)
    assert periods_for_time(t, tau) == 14
    assert effective_coupling(100, 1.0, tau) == pytest.approx(0.4 / 3)


def test_one_spin_period_is_global_phase():
    s = build_system(1)
    u = period_propagator(s, 1.3, 0.2)
    np.testing.assert_allclose(u, np.exp(-3j * 1.3 * 0.2 / 4) * np.eye(2), atol=1e-14)


def test_explicit_pulse_product_ten_spins():
    s = build_system(10)
    chi, tau = 1.0, 0.05
    free = expm(-1j * chi * tau * s.jz @ s.jz)

    def r(axis, angle):
        return expm(-1j * angle * s.op(axis))

    h = math.pi / 2
    u = free @ r("y", h) @ free @ r("y", -h) @ r("x", h) @ free @ r("x", -h)
    np.testing.assert_allclose(period_propagator(s, chi, tau), u, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.4])
def test_bch_halving_near_one_eighth(alpha):
    s = build_system(20)
    tau = tau_from_alpha(20, 1.0, alpha)
    ratio = bch_residual(s, 1.0, tau / 2) / bch_residual(s, 1.0, tau)
    assert 1 / 16 <= ratio <= 1 / 4


def test_strong_drive_nearly_reaches_effective_peak():
    r = ex.floquet_vs_effective(100, 1.0)
    assert r["qfi_max_floquet"] >= 0.8 * r["qfi_max_effective"]


def test_floquet_peak_time_follows_prediction():
    for n in range(20, 201, 20):
        ratio = ex.floquet_t_max(n, 0.4) / floquet_critical_time(n, 0.4)
        assert abs(ratio - 1) <= 0.2, (n, ratio)


# metrology

def test_dephased_ghz_qfi():
    s = build_system(4)
    rho = np.zeros((5, 5), dtype=complex)
    rho[0, 0] = rho[4, 4] = 0.5
    dm = DensityMatrix(s, rho)
    assert qfi_mixed(dm, "z") == pytest.approx(0, abs=1e-14)
    assert qfi_mixed(dm, "x") == pytest.approx(qfi_bures(rho, s.jx, 1e-4), rel=1e-6)


def _fibonacci_sphere(k):
    i = np.arange(k) + 0.5
    z = 1 - 2 * i / k
    phi = math.pi * (3 - math.sqrt(5)) * i
    r = np.sqrt(1 - z**2)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def test_optimal_qfi_beats_grid_search():
    psi = _xyz(20, _tc(20))
    best = qfi_optimal(psi).qfi
    grid = [qfi_pure(psi, v) for v in _fibonacci_sphere(100)]
    assert best >= max(grid) - 1e-9
    assert max(grid) > 0.95 * best


def test_ghz_parity_on_central_fringe():
    s = build_system(30)
    th = np.linspace(-math.pi / 30, math.pi / 30, 41)
    np.testing.assert_allclose(parity_curve(ghz_state(s), th).values, np.cos(30 * th), atol=1e-10)
    d = np.zeros(16)
    d[15] = 1 / math.sqrt(2)
    np.testing.assert_allclose(parity_closed_form(d, th), np.cos(30 * th), atol=1e-12)


@pytest.mark.parametrize("frac", [0.5, 1.0, 1.5])
def test_ghz_like_parity_starts_at_one(frac):
    n = 40
    psi = to_quantization_axis(_xyz(n, frac * _tc(n)), "y")
    assert parity_expectation(psi, 0.0) == pytest.approx(1, abs=1e-10)


def test_closed_form_matches_brute_force_fifty_angles():
    psi = to_quantization_axis(_xyz(20, 0.8 * _tc(20)), "y")
    d = ghz_like_coefficients(psi)
    th = np.linspace(-1, 1, 50)
    np.testing.assert_allclose(parity_curve(psi, th).values, parity_closed_form(d, th), atol=1e-10)


def test_ghz_sensitivity_at_half_fringe():
    n = 50
    assert sensitivity(ghz_state(build_system(n))) == pytest.approx(1 / n, rel=1e-12)


def test_sensitivity_tracks_qcrb():
    n = 100
    for t in np.linspace(0.3, 1.0, 8) * _tc(n):
        psi = _xyz(n, t)
        assert sensitivity(psi) <= 1.25 * qfi_optimal(psi).qfi ** -0.5
        assert sensitivity(psi, theta0=1e-4 / n) == pytest.approx(qfi_optimal(psi).qfi ** -0.5, rel=0.01)


# loss

def test_four_spin_ghz_like_loss_against_partial_trace():
    n = 4
    psi = to_quantization_axis(_xyz(n, 1.2 * _tc(n)), "y")
    full = dicke_isometry(n) @ psi.amplitudes
    reduced = partial_trace_last(np.outer(full, full.conj()), n)
    d = dicke_isometry(n - 1)
    np.testing.assert_allclose(lose_one(psi).matrix, d.T @ reduced @ d, atol=1e-10)


def test_loss_reference_orderings():
    c = ex.loss_curves(100, 10, fractions=(1.0, 0.6))
    assert c["ghz"][1] < c["xyz_1tc"][1]
    assert c["xyz_0.6tc"][10] > c["xyz_1tc"][10]


# semiclassical

def test_flow_reference_point():
    v = mean_field_flow(np.array([1, 1, 0]) / math.sqrt(2), 1.0, 1)
    np.testing.assert_allclose(v, [-1 / (2 * math.sqrt(2)), 1 / (2 * math.sqrt(2)), 0], atol=1e-15)


def test_equator_is_invariant():
    tr = integrate_trajectory(np.array([0.6, 0.8, 0.0]), 1.0, 50, 1.0, 500)
    assert np.abs(tr.points[:, 2]).max() < 1e-8


def test_edge_start_reaches_pole_at_critical_time():
    n = 100
    p0 = np.array([math.sqrt(1 - 1 / n), 1 / math.sqrt(n), 0.0])
    tr = integrate_trajectory(p0, 1.0, n, _tc(n), 2000)
    assert abs(tr.points[-1][1] - math.sqrt(1 - 1 / n)) < 0.1


def test_tat_trajectory_passes_pole_and_continues():
    n = 100
    p0 = np.array([math.sqrt(1 - 1 / n), 1 / math.sqrt(n), 0.0])
    tr = integrate_trajectory(p0, 1.0, n, 3 * _tc(n), 3000, model="tat")
    k = int(np.argmax(tr.points[:, 1]))
    assert tr.points[k, 1] > 0.99
    assert tr.points[-1, 0] < -0.9


def test_critical_time_values():
    ct = critical_time(100)
    assert ct["approx"] == pytest.approx(0.046052, abs=1e-6)
    assert ct["exact"] == pytest.approx(0.045951, abs=1e-6)


# analysis

def test_husimi_peaks_of_ghz_like_state():
    n = 100
    q = husimi_q(_xyz(n, _tc(n)), SphereGrid(3, 400))
    phis, row = q.equator()
    top = phis[np.argmax(row)]
    other = phis[np.argmax(np.where(np.abs(np.angle(np.exp(1j * (phis - top)))) > math.pi / 2, row, -1))]
    peaks = sorted([top, other])
    assert abs(peaks[0] - math.pi / 2) < 0.3 and abs(peaks[1] - 3 * math.pi / 2) < 0.3


def test_coherent_state_parity_sectors_balanced():
    psi = x_polarized(build_system(100))
    even, odd = parity_sector_weights(psi)
    assert even == pytest.approx(0.5, abs=0.05) and odd == pytest.approx(0.5, abs=0.05)
    traj = [_xyz(100, t) for t in np.linspace(0, 2 * _tc(100), 9)]
    w = [parity_sector_weights(st)[0] for st in traj]
    assert max(w) - min(w) < 1e-10


def test_ghz_transverse_variance_scaling():
    ns = [100, 200, 400]
    var = []
    for n in ns:
        g = ghz_state(build_system(n))
        s = g.system
        var.append((g.expect(s.jx @ s.jx) - g.expect(s.jx) ** 2).real)
    np.testing.assert_allclose(var, np.array(ns) / 4)
    assert fit_power_law(ns, var).exponent == pytest.approx(1.0)
