"""Quantum Fisher information, parity oscillations and phase sensitivity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spin import DensityMatrix, PureState, SpinSystem, State, parity_matrix, rotation_matrix

DEFAULT_RANK_TOL = 1e-12


class FlatSignalError(ValueError):
    """The parity signal has zero slope, so the error-propagation formula is undefined."""


@dataclass(frozen=True)
class MetrologyReport:
    qfi: float
    axis: np.ndarray
    N: int

    @property
    def sql(self) -> int:
        return self.N

    @property
    def hl(self) -> int:
        return self.N**2

    @property
    def dtheta_qcrb(self) -> float:
        return self.qfi ** -0.5 if self.qfi > 0 else math.inf

    def as_dict(self) -> dict:
        return {"qfi": self.qfi, "axis": [float(a) for a in self.axis], "sql": self.sql,
                "hl": self.hl, "dtheta_qcrb": self.dtheta_qcrb}


@dataclass(frozen=True)
class ParityCurve:
    thetas: np.ndarray
    values: np.ndarray


def _spin_ops(sys: SpinSystem):
    return sys.jx, sys.jy, sys.jz


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Fix the eigenvector sign: the largest-|component| entry (first on ties) is positive."""
    v = np.asarray(v, dtype=float)
    k = int(np.argmax(np.round(np.abs(v), 12)))
    return -v if v[k] < 0 else v


def qfi_pure(psi: PureState, axis) -> float:
    """4 Var(J_n) for a pure state."""
    op = psi.system.op(axis)
    a = psi.amplitudes
    b = op @ a
    return 4 * float((np.vdot(b, b) - np.vdot(a, b) ** 2).real)


def _spectral(rho: DensityMatrix):
    q, vecs = np.linalg.eigh(rho.matrix)
    return q, vecs


def _qfi_weights(q: np.ndarray, rank_tol: float) -> np.ndarray:
    # 2 (q_k - q_l)^2 / (q_k + q_l) for pairs whose total weight exceeds rank_tol * max(q)
    s = q[:, None] + q[None, :]
    diff = q[:, None] - q[None, :]
    keep = s > rank_tol * max(q.max(), 0.0)
    w = np.zeros_like(s)
    w[keep] = 2 * diff[keep] ** 2 / s[keep]
    return w


def qfi_mixed(rho: DensityMatrix, axis, rank_tol: float = DEFAULT_RANK_TOL) -> float:
    """QFI of rho for generator J_n from its spectral decomposition."""
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    try:
        q, vecs = _spectral(rho)
    except np.linalg.LinAlgError as exc:
        raise ValueError("spectral decomposition failed") from exc
    q = np.clip(q, 0.0, None)
    gen = vecs.conj().T @ rho.system.op(axis) @ vecs
    return float(np.sum(_qfi_weights(q, rank_tol) * np.abs(gen) ** 2))


def covariance_matrix(psi: PureState) -> np.ndarray:
    """Symmetrized covariance Cov_ab = <{J_a, J_b}>/2 - <J_a><J_b>."""
    a = psi.amplitudes
    vs = [op @ a for op in _spin_ops(psi.system)]
    mean = np.array([np.vdot(a, v).real for v in vs])
    gram = np.array([[np.vdot(u, v).real for v in vs] for u in vs])
    return gram - np.outer(mean, mean)


def qfi_matrix(state: State, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """3x3 QFI matrix for the linear generators Jx, Jy, Jz."""
    if isinstance(state, PureState):
        return 4 * covariance_matrix(state)
    q, vecs = _spectral(state)
    q = np.clip(q, 0.0, None)
    w = _qfi_weights(q, rank_tol)
    gens = [vecs.conj().T @ op @ vecs for op in _spin_ops(state.system)]
    f = np.empty((3, 3))
    for i in range(3):
        for k in range(i, 3):
            # sum_{kl} w_kl Re[<k|J_a|l><l|J_b|k>]
            f[i, k] = f[k, i] = float(np.sum(w * (gens[i] * gens[k].T).real))
    return f


def qfi_optimal(state: State, rank_tol: float = DEFAULT_RANK_TOL) -> MetrologyReport:
    """Largest QFI over all generators n.J, with the maximizing axis."""
    f = qfi_matrix(state, rank_tol)
    vals, vecs = np.linalg.eigh(f)
    return MetrologyReport(float(max(vals[-1], 0.0)), canonical_sign(vecs[:, -1]), state.system.N)


def qfi(state: State, axis=None) -> float:
    """QFI along ``axis``, or optimized over axes when ``axis`` is None."""
    if axis is None:
        return qfi_optimal(state).qfi
    if isinstance(state, PureState):
        return qfi_pure(state, axis)
    return qfi_mixed(state, axis)


def _rotated_for_parity(state: State, theta: float):
    """Apply exp(-i pi J_theta / 2) with J_theta = Jy cos(theta) - Jx sin(theta)."""
    axis = np.array([-math.sin(theta), math.cos(theta), 0.0])
    r = rotation_matrix(state.system, axis, math.pi / 2)
    if isinstance(state, PureState):
        return r @ state.amplitudes
    return r @ state.matrix @ r.conj().T


def parity_expectation(state: State, theta: float) -> float:
    """<exp(i pi J_theta/2) Pi exp(-i pi J_theta/2)>."""
    p = np.real(np.diag(parity_matrix(state.system)))
    rotated = _rotated_for_parity(state, theta)
    if rotated.ndim == 1:
        return float(np.sum(p * np.abs(rotated) ** 2))
    return float(np.sum(p * np.real(np.diag(rotated))))


def parity_curve(state: State, thetas) -> ParityCurve:
    thetas = np.asarray(thetas, dtype=float)
    return ParityCurve(thetas, np.array([parity_expectation(state, t) for t in thetas]))


def to_quantization_axis(state: State, axis: str = "z") -> State:
    """Rotate so that ``axis`` becomes the z quantization axis."""
    if axis == "z":
        return state
    # exp(-i pi Jx/2) sends +y to +z; exp(+i pi Jy/2) sends +x to +z
    rot_axis, angle = {"y": ("x", math.pi / 2), "x": ("y", -math.pi / 2)}[axis]
    r = rotation_matrix(state.system, rot_axis, angle)
    if isinstance(state, PureState):
        return PureState(state.system, r @ state.amplitudes)
    return DensityMatrix(state.system, r @ state.matrix @ r.conj().T)


def principal_axis(state: State) -> str:
    """Cartesian axis ('x', 'y' or 'z') with the largest spin variance; first wins ties."""
    sys = state.system
    var = []
    for op in _spin_ops(sys):
        mean = state.expect(op).real
        var.append(state.expect(op @ op).real - mean**2)
    return "xyz"[int(np.argmax(np.round(var, 9)))]


def ghz_like_coefficients(psi: PureState, axis: str = "z", tol: float = 1e-8) -> np.ndarray:
    """Real coefficients d_0..d_{N/2} of d_0|0> + sum_m d_m (|m> + |-m>).

    The state is first rotated so ``axis`` is the quantization axis and a
    global phase is removed.  Raises ValueError if the state is not of that
    form (odd N, complex relative phases, or asymmetric in m).
    """
    sys = psi.system
    if sys.N % 2:
        raise ValueError("GHZ-like coefficient form needs even N")
    c = to_quantization_axis(psi, axis).amplitudes
    k = int(np.argmax(np.abs(c)))
    c = c * np.exp(-1j * np.angle(c[k]))
    if np.abs(c.imag).max() > tol or np.abs(c - c[::-1]).max() > tol:
        raise ValueError("state is not of real, m-symmetric GHZ-like form")
    half = sys.N // 2
    # index half is m=0, index half - m is +m
    return np.array([c[half - m].real for m in range(half + 1)])


def _check_coefficients(d):
    d = np.asarray(d, dtype=float)
    norm = d[0] ** 2 + 2 * np.sum(d[1:] ** 2)
    if abs(norm - 1) > 1e-8:
        raise ValueError(f"coefficients not normalized: d0^2 + 2 sum d_m^2 = {norm}")
    return d


def parity_closed_form(d, theta):
    """d_0^2 + sum_{m>0} 2 d_m^2 cos(2 m theta); d[m] is the weight of |+-m>."""
    d = _check_coefficients(d)
    m = np.arange(1, len(d))
    theta = np.asarray(theta, dtype=float)
    return d[0] ** 2 + np.sum(2 * d[1:] ** 2 * np.cos(2 * np.multiply.outer(theta, m)), axis=-1)


def parity_closed_form_slope(d, theta):
    """d/dtheta of the closed form: -sum 4 d_m^2 m sin(2 m theta)."""
    d = _check_coefficients(d)
    m = np.arange(1, len(d))
    theta = np.asarray(theta, dtype=float)
    return -np.sum(4 * d[1:] ** 2 * m * np.sin(2 * np.multiply.outer(theta, m)), axis=-1)


def sensitivity_from_coefficients(d, theta: float) -> float:
    """|Delta Pi / d<Pi>/dtheta| evaluated from the closed form."""
    p = float(parity_closed_form(d, theta))
    slope = float(parity_closed_form_slope(d, theta))
    if slope == 0:
        raise FlatSignalError(f"parity signal is flat at theta={theta}")
    return _ratio(p, slope)


def _ratio(p: float, slope: float) -> float:
    if p * p > 1 + 1e-10:
        raise ValueError(f"|<Pi>| = {abs(p)} exceeds 1")
    # (1-p)(1+p) keeps the small factor accurate as p -> 1
    var = max((1 - p) * (1 + p), 0.0)
    return math.sqrt(var) / abs(slope)


def sensitivity(state: State, theta0: float | None = None, axis: str | None = None) -> float:
    """Angular sensitivity of the parity signal at ``theta0`` (default pi/(2N)).

    ``axis`` is the quantization axis the state's two lobes sit on; by default
    the Cartesian axis with the largest spin variance.  Pure states of
    GHZ-like form along it use the analytic derivative of the closed form.
    Anything else uses a central difference with step pi/(100N) on the
    brute-force signal.
    """
    N = state.system.N
    if theta0 is None:
        theta0 = math.pi / (2 * N)
    if axis is None:
        axis = principal_axis(state)
    if isinstance(state, PureState) and N % 2 == 0:
        try:
            d = ghz_like_coefficients(state, axis)
        except ValueError:
            pass
        else:
            return sensitivity_from_coefficients(d, theta0)
    h = math.pi / (100 * N)
    state = to_quantization_axis(state, axis)
    p = parity_expectation(state, theta0)
    slope = (parity_expectation(state, theta0 + h) - parity_expectation(state, theta0 - h)) / (2 * h)
    if abs(slope) < 1e-14:
        raise FlatSignalError(f"parity signal is flat at theta={theta0}")
    return _ratio(p, slope)
