"""Unitary and Lindblad time evolution, instantaneous rotations, pulse schedules."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .models import Hamiltonian
from .spin import BlochAngles, DensityMatrix, PureState, SpinSystem, State, rotation_matrix

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


class IntegrationError(RuntimeError):
    """Raised when an open-system integration fails or breaks a state invariant."""

    def __init__(self, message: str, time_reached: float | None = None):
        super().__init__(message)
        self.time_reached = time_reached


@dataclass(frozen=True)
class LindbladOp:
    matrix: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("jump operator has non-finite entries")


def superradiance(sys: SpinSystem, gamma: float) -> LindbladOp:
    """Collective decay L = sqrt(Gamma/2) J-."""
    if gamma < 0:
        raise ValueError("decay rate must be nonnegative")
    return LindbladOp(math.sqrt(gamma / 2) * sys.jm)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list = field(repr=False)
    # largest |tr(rho) - 1| seen; zero for pure-state runs
    trace_drift: float = 0.0

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def final(self) -> State:
        return self.states[-1]

    def observables(self, names: Sequence[str] = ("jx", "jy", "jz", "norm", "parity")) -> dict:
        """Columns of expectation values along the trajectory."""
        from .spin import parity_matrix

        sys = self.states[0].system
        table = {"time": np.asarray(self.times, dtype=float)}
        for name in names:
            if name in ("jx", "jy", "jz"):
                op = getattr(sys, name)
                table[name] = np.array([s.expect(op).real for s in self.states])
            elif name == "norm":
                table[name] = np.array([_norm(s) for s in self.states])
            elif name == "parity":
                p = parity_matrix(sys)
                table[name] = np.array([s.expect(p).real for s in self.states])
            else:
                raise ValueError(f"unknown observable {name!r}")
        return table


def _norm(state: State) -> float:
    if isinstance(state, PureState):
        return float(np.vdot(state.amplitudes, state.amplitudes).real)
    return float(np.trace(state.matrix).real)


def _check_hamiltonian(H: Hamiltonian, sys: SpinSystem):
    if H.system.dim != sys.dim:
        raise ValueError(f"Hamiltonian dimension {H.system.dim} does not match state dimension {sys.dim}")


class UnitaryEvolver:
    """exp(-iHt) by a single eigendecomposition, reused across many times."""

    def __init__(self, H: Hamiltonian):
        self.hamiltonian = H
        self.energies, self.vectors = np.linalg.eigh(H.matrix)

    def propagator(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def evolve_amplitudes(self, amps: np.ndarray, t: float) -> np.ndarray:
        v = self.vectors
        return v @ (np.exp(-1j * self.energies * t) * (v.conj().T @ amps))

    def evolve(self, state: State, t: float) -> State:
        if isinstance(state, PureState):
            return PureState(state.system, self.evolve_amplitudes(state.amplitudes, t))
        u = self.propagator(t)
        return DensityMatrix(state.system, u @ state.matrix @ u.conj().T)


def evolve_unitary(H: Hamiltonian, psi0: State, times: Sequence[float]) -> Trajectory:
    """Closed-system evolution of a pure state (or density matrix) sampled at ``times``."""
    _check_hamiltonian(H, psi0.system)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    ev = UnitaryEvolver(H)
    return Trajectory(times, [ev.evolve(psi0, t) for t in times])


def apply_rotation(state: State, axis, angle: float) -> State:
    """Instantaneous rotation exp(-i angle n.J) about 'x'|'y'|'z', a 3-vector or BlochAngles."""
    if isinstance(axis, BlochAngles):
        axis = axis.vector()
    r = rotation_matrix(state.system, axis, angle)
    if isinstance(state, PureState):
        return PureState(state.system, r @ state.amplitudes)
    return DensityMatrix(state.system, r @ state.matrix @ r.conj().T)


def lindblad_rhs(H: np.ndarray, jumps: Sequence[np.ndarray]):
    """Right-hand side of the master equation acting on a flattened density matrix."""
    d = H.shape[0]
    # -i(H_eff rho - rho H_eff^+) absorbs the anticommutator term.  Written with
    # rho on both sides (not (a rho)^+) so round-off anti-Hermitian parts are
    # damped by the same contractive map instead of growing.
    h_eff = H - 0.5j * sum((L.conj().T @ L for L in jumps), np.zeros_like(H))
    a = -1j * h_eff
    a_dag = a.conj().T

    def rhs(_t, y):
        rho = y.reshape(d, d)
        out = a @ rho + rho @ a_dag
        for L in jumps:
            out += L @ rho @ L.conj().T
        return out.ravel()

    return rhs


def evolve_lindblad(
    H: Hamiltonian,
    jumps: Sequence[LindbladOp],
    rho0: State,
    times: Sequence[float],
    tol: float = DEFAULT_TOL,
    method: str = "DOP853",
) -> Trajectory:
    """Integrate drho/dt = -i[H, rho] + sum_k (L rho L^+ - {L^+ L, rho}/2).

    Adaptive explicit Runge-Kutta on the flattened matrix; the trace is never
    renormalized, so its drift is reported as a diagnostic in the trajectory.
    Drift or Hermiticity loss beyond ``10 * tol`` raises IntegrationError.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(rho0, PureState):
        rho0 = rho0.to_density()
    sys = rho0.system
    _check_hamiltonian(H, sys)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and nondecreasing")
    d = sys.dim
    mats = [L.matrix for L in jumps]
    for L in mats:
        if L.shape != (d, d):
            raise ValueError("jump operator dimension does not match the state")
    rhs = lindblad_rhs(H.matrix, mats)
    y0 = np.asarray(rho0.matrix, dtype=complex).ravel().copy()
    t0 = 0.0 if times[0] > 0 else times[0]
    out_states = []
    drift = 0.0
    if times[-1] == t0:
        sol_y = np.repeat(y0[:, None], len(times), axis=1)
    else:
        sol = solve_ivp(rhs, (t0, times[-1]), y0, method=method, t_eval=times, rtol=tol, atol=tol * 1e-2)
        if sol.status != 0:
            reached = float(sol.t[-1]) if len(sol.t) else t0
            raise IntegrationError(f"Lindblad integration failed at t={reached}: {sol.message}", reached)
        sol_y = sol.y
    for k, t in enumerate(times):
        rho = sol_y[:, k].reshape(d, d)
        tr_err = abs(np.trace(rho).real - 1.0)
        herm_err = np.abs(rho - rho.conj().T).max()
        drift = max(drift, tr_err)
        if tr_err > 10 * tol or herm_err > 10 * tol:
            raise IntegrationError(
                f"density-matrix invariant breached at t={t}: trace error {tr_err:.3e}, "
                f"Hermiticity error {herm_err:.3e}", float(t))
        # symmetrize away round-off only; the trace is left alone
        out_states.append(DensityMatrix(sys, 0.5 * (rho + rho.conj().T)))
    if drift > 0:
        log.debug("Lindblad trace drift %.3e", drift)
    return Trajectory(times, out_states, trace_drift=drift)


def run_pulse_schedule(schedule, initial: State, H_free: Hamiltonian, jumps: Sequence[LindbladOp] = (),
                       tol: float = DEFAULT_TOL, record: str = "period") -> Trajectory:
    """Alternate ideal instantaneous rotations with free evolution under ``H_free``.

    Free segments are unitary when ``jumps`` is empty and Lindblad otherwise;
    pulses are exact unitaries in both cases.  ``record='period'`` samples the
    state at every period boundary (including t=0), ``record='segment'`` after
    every free segment.
    """
    if record not in ("period", "segment"):
        raise ValueError("record must be 'period' or 'segment'")
    _check_hamiltonian(H_free, initial.system)
    jumps = list(jumps)
    state = initial
    if jumps and isinstance(state, PureState):
        state = state.to_density()
    t = 0.0
    times, states = [0.0], [state]
    drift = 0.0
    segs = list(schedule.segments)
    if schedule.periods == 0 or not segs:
        return Trajectory(np.array(times), states)

    evolver = UnitaryEvolver(H_free) if not jumps else None
    for _ in range(schedule.periods):
        for seg in segs:
            if seg.kind == "rotate":
                state = apply_rotation(state, seg.axis, seg.angle)
                continue
            if evolver is not None:
                state = evolver.evolve(state, seg.duration)
            else:
                tr = evolve_lindblad(H_free, jumps, state, [0.0, seg.duration], tol=tol)
                drift = max(drift, tr.trace_drift)
                state = tr.final
            t += seg.duration
            if record == "segment":
                times.append(t)
                states.append(state)
        if record == "period":
            times.append(t)
            states.append(state)
    return Trajectory(np.array(times), states, trace_drift=drift)
