"""Husimi Q fields, Fock-basis distributions, parity-sector weights and power-law fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrology import to_quantization_axis
from .spin import PureState, State, coherent_amplitudes


@dataclass(frozen=True)
class SphereGrid:
    """Uniform theta samples of [0, pi] (endpoints included) and phi samples of [0, 2pi)."""

    n_theta: int = 200
    n_phi: int = 400

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("grid needs at least 2 points per direction")

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(0, math.pi, self.n_theta)

    @property
    def phis(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.n_phi) / self.n_phi

    def integrate(self, values: np.ndarray) -> float:
        """Integral over the sphere: trapezoid in theta (sin weight), periodic rectangle in phi."""
        th = self.thetas
        ring = values.sum(axis=1) * (2 * math.pi / self.n_phi)
        return float(np.trapezoid(ring * np.sin(th), th))


@dataclass(frozen=True)
class QField:
    grid: SphereGrid
    values: np.ndarray  # shape (n_theta, n_phi)

    def normalization(self, N: int) -> float:
        """(N+1)/(4 pi) times the sphere integral of Q; 1 up to quadrature error."""
        return (N + 1) / (4 * math.pi) * self.grid.integrate(self.values)

    def equator(self) -> tuple[np.ndarray, np.ndarray]:
        """Q along the theta row nearest pi/2."""
        i = int(np.argmin(np.abs(self.grid.thetas - math.pi / 2)))
        return self.grid.phis, self.values[i]

    def rows(self):
        for i, th in enumerate(self.grid.thetas):
            for k, ph in enumerate(self.grid.phis):
                yield th, ph, self.values[i, k]


def husimi_q(state: State, grid: SphereGrid) -> QField:
    """Q(theta, phi) = <theta,phi| rho |theta,phi>."""
    sys = state.system
    k = np.arange(sys.dim)
    # amplitudes separate as f(theta)_k * exp(i k phi)
    radial = np.array([coherent_amplitudes(sys, th, 0.0) for th in grid.thetas])  # (n_theta, dim)
    phase = np.exp(1j * np.outer(grid.phis, k))  # (n_phi, dim)
    if isinstance(state, PureState):
        # overlap <theta,phi|psi> = sum_k conj(f_k e^{ik phi}) c_k
        amp = (radial * state.amplitudes[None, :]) @ phase.conj().T
        q = np.abs(amp) ** 2
    else:
        rho = state.matrix
        q = np.empty((grid.n_theta, grid.n_phi))
        for i, f in enumerate(radial):
            kets = phase * f[None, :]  # rows are |theta,phi> for each phi
            q[i] = np.einsum("pk,kl,pl->p", kets.conj(), rho, kets).real
    return QField(grid, q)


def probability_distribution(state: State, axis: str = "z") -> np.ndarray:
    """P_m on eigenstates of J_axis, ordered m = j, j-1, ..., -j."""
    rotated = to_quantization_axis(state, axis)
    if isinstance(rotated, PureState):
        return np.abs(rotated.amplitudes) ** 2
    return np.real(np.diag(rotated.matrix)).copy()


def parity_sector_weights(state: State, axis: str = "z") -> tuple[float, float]:
    """Total probability on even and odd (j - m), i.e. the two parity sectors."""
    p = probability_distribution(state, axis)
    return float(p[0::2].sum()), float(p[1::2].sum())


def pole_weight(p: np.ndarray, depth: int = 1) -> float:
    """Probability on the ``depth`` outermost levels at each pole."""
    return float(p[:depth].sum() + p[len(p) - depth:].sum())


def central_weight(p: np.ndarray, half_width: float) -> float:
    """Probability on |m| <= half_width."""
    N = len(p) - 1
    m = N / 2 - np.arange(N + 1)
    return float(p[np.abs(m) <= half_width + 1e-12].sum())


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r2: float


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least-squares fit of log y = log a + b log x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 3:
        raise ValueError("need at least 3 matching (x, y) points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    b, log_a = np.polyfit(lx, ly, 1)
    resid = ly - (log_a + b * lx)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    # flat data: ss_tot is pure round-off, and a zero-slope line is exact
    flat = ss_tot <= 1e-24 * max(1.0, float(np.sum(ly**2)))
    r2 = 1.0 if flat else 1.0 - np.sum(resid**2) / ss_tot
    return PowerLawFit(float(b), float(math.exp(log_a)), float(r2))
