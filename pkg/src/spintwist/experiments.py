"""Composite workflows behind the figure-style computations and the CLI."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize_scalar

from . import floquet
from .analysis import central_weight, pole_weight, probability_distribution
from .loss import lose_particles
from .metrology import qfi_optimal, sensitivity
from .models import Hamiltonian, h_cavity_oat, h_oat, h_tnt, h_xyz
from .propagate import UnitaryEvolver, evolve_lindblad, run_pulse_schedule, superradiance
from .semiclassical import critical_time, floquet_critical_time
from .spin import PureState, build_system, ghz_state, x_polarized


def qfi_curve(H: Hamiltonian, psi0: PureState, times) -> np.ndarray:
    ev = UnitaryEvolver(H)
    return np.array([qfi_optimal(ev.evolve(psi0, t)).qfi for t in times])


def find_qfi_peak(H: Hamiltonian, psi0: PureState, t_lo: float, t_hi: float, n_grid: int = 81):
    """Time of the first-found global QFI maximum on [t_lo, t_hi], refined by bounded search.

    Returns (t_max, F_max).
    """
    ev = UnitaryEvolver(H)

    def neg(t):
        return -qfi_optimal(ev.evolve(psi0, t)).qfi

    ts = np.linspace(t_lo, t_hi, n_grid)
    vals = np.array([neg(t) for t in ts])
    k = int(np.argmin(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, n_grid - 1)]
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * max(t_hi, 1)})
    if res.fun <= vals[k]:
        return float(res.x), float(-res.fun)
    return float(ts[k]), float(-vals[k])


def xyz_state(N: int, t: float, chi_xyz: float = 1.0) -> PureState:
    """|x> evolved under the XYZ model for time t."""
    sys = build_system(N)
    return UnitaryEvolver(h_xyz(sys, chi_xyz)).evolve(x_polarized(sys), t)


def xyz_peak(N: int, chi_xyz: float = 1.0):
    """(t_max, F_max) of the XYZ model from |x>, searched on [0.3, 2] t_c."""
    sys = build_system(N)
    tc = critical_time(N, abs(chi_xyz))["approx"]
    return find_qfi_peak(h_xyz(sys, chi_xyz), x_polarized(sys), 0.3 * tc, 2.0 * tc)


def floquet_qfi_curve(N: int, alpha: float, n_periods: int, chi: float = 1.0, sign: int = 1):
    """Optimal QFI at every period boundary of the driven OAT model, starting from |x>."""
    sys = build_system(N)
    sched = floquet.build_schedule(sys, chi, alpha, n_periods, sign)
    traj = run_pulse_schedule(sched, x_polarized(sys), h_oat(sys, chi))
    return traj.times, np.array([qfi_optimal(s).qfi for s in traj.states])


def floquet_vs_effective(N: int, alpha: float, chi: float = 1.0, span: float = 2.0):
    """Peak QFI of the driven scheme and of its effective XYZ model over ``span`` x t_c."""
    sys = build_system(N)
    tau = floquet.tau_from_alpha(N, chi, alpha)
    t_end = span * floquet_critical_time(N, alpha, chi)
    n = max(floquet.periods_for_time(t_end, tau), 1)
    times, f_fd = floquet_qfi_curve(N, alpha, n, chi)
    k = int(np.argmax(f_fd))
    h_eff = floquet.effective_hamiltonian(sys, chi, tau)
    t_eff, f_eff = find_qfi_peak(h_eff, x_polarized(sys), 0.2 * t_end / span, t_end)
    return {"t_max_floquet": float(times[k]), "qfi_max_floquet": float(f_fd[k]),
            "t_max_effective": t_eff, "qfi_max_effective": f_eff}


def floquet_t_max(N: int, alpha: float, chi: float = 1.0) -> float:
    """Period boundary at which the driven scheme's QFI peaks."""
    tau = floquet.tau_from_alpha(N, chi, alpha)
    n = max(floquet.periods_for_time(2 * floquet_critical_time(N, alpha, chi), tau), 1)
    times, f = floquet_qfi_curve(N, alpha, n, chi)
    return float(times[int(np.argmax(f))])


def oat_time_series(N: int, times, chi: float = 1.0) -> np.ndarray:
    sys = build_system(N)
    return qfi_curve(h_oat(sys, chi), x_polarized(sys), times)


def decoherence_cell(N: int, gamma: float, chi: float = 1.0, alpha: float = 0.4, tol: float = 1e-8) -> dict:
    """Optimal QFI under superradiance for the driven scheme and for plain cavity OAT.

    Both start from |x> with H = chi (J^2 - Jz^2) and L = sqrt(Gamma/2) J-.  The
    driven run stops at the period boundary nearest 3 ln N/(alpha N chi), the
    OAT run at chi t = pi/2.  Decay acts during every free segment.
    """
    sys = build_system(N)
    h = h_cavity_oat(sys, chi)
    jumps = [superradiance(sys, gamma)] if gamma > 0 else []
    tau = floquet.tau_from_alpha(N, chi, alpha)
    n = max(floquet.periods_for_time(floquet_critical_time(N, alpha, chi), tau), 1)
    sched = floquet.build_schedule(sys, chi, alpha, n)
    fd = run_pulse_schedule(sched, x_polarized(sys), h, jumps, tol=tol).final
    t_oat = math.pi / (2 * chi)
    if jumps:
        oat = evolve_lindblad(h, jumps, x_polarized(sys), [t_oat], tol=tol).final
    else:
        oat = UnitaryEvolver(h).evolve(x_polarized(sys), t_oat)
    f_fd, f_oat = qfi_optimal(fd).qfi, qfi_optimal(oat).qfi
    return {"N": N, "gamma": gamma, "qfi_fd": f_fd, "qfi_oat": f_oat, "ratio": f_fd / f_oat}


def loss_curves(N: int, max_loss: int, fractions=(1.0, 0.8, 0.6), chi_xyz: float = 1.0) -> dict:
    """Optimal QFI vs number of lost particles for GHZ and XYZ states at fractions of t_c."""
    sys = build_system(N)
    tc = critical_time(N, chi_xyz)["approx"]
    states = {"ghz": ghz_state(sys)}
    ev = UnitaryEvolver(h_xyz(sys, chi_xyz))
    for f in fractions:
        states[f"xyz_{f:g}tc"] = ev.evolve(x_polarized(sys), f * tc)
    out = {"delta_n": list(range(max_loss + 1))}
    for name, st in states.items():
        rho = st.to_density()
        vals = []
        for dn in range(max_loss + 1):
            vals.append(qfi_optimal(rho).qfi)
            if dn < max_loss:
                rho = lose_particles(rho, 1).rho
        out[name] = vals
    return out


def tnt_vs_xyz(N: int, chi: float = 1.0) -> dict:
    """Central (|m| <= N/10) and pole weights along y for TNT at ln(8N)/N and XYZ at t_c."""
    sys = build_system(N)
    t_tnt = math.log(8 * N) / (N * chi)
    tnt = UnitaryEvolver(h_tnt(sys, chi)).evolve(x_polarized(sys), t_tnt)
    xyz = xyz_state(N, critical_time(N, chi)["approx"], chi)
    res = {}
    for name, st in (("tnt", tnt), ("xyz", xyz)):
        p = probability_distribution(st, "y")
        res[name] = {"central": central_weight(p, N / 10), "poles": pole_weight(p, 1),
                     "poles2": pole_weight(p, 2), "qfi": qfi_optimal(st).qfi}
    return res


def min_sensitivity(N: int, chi_xyz: float = 1.0, n_grid: int = 41) -> float:
    """Best parity sensitivity at theta0 = pi/(2N) along the XYZ trajectory, t in [0.3, 1.5] t_c."""
    sys = build_system(N)
    tc = critical_time(N, chi_xyz)["approx"]
    ev = UnitaryEvolver(h_xyz(sys, chi_xyz))
    x = x_polarized(sys)

    def dtheta(t):
        return sensitivity(ev.evolve(x, t))

    ts = np.linspace(0.3 * tc, 1.5 * tc, n_grid)
    vals = np.array([dtheta(t) for t in ts])
    k = int(np.argmin(vals))
    res = minimize_scalar(dtheta, bounds=(ts[max(k - 1, 0)], ts[min(k + 1, n_grid - 1)]), method="bounded")
    return float(min(res.fun, vals[k]))


