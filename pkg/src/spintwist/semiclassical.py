"""Mean-field dynamics on the Bloch sphere.

Variables are the normalized mean spin (X, Y, Z) = <J>/j.  Correlations are
dropped (<J_a J_b> -> <J_a><J_b>) in the Heisenberg equations.

XYZ model, H = (2chi/N)(JxJyJz + JzJyJx):

    dX/dt = chi N (Z^2 - Y^2) X,  dY/dt = chi N (X^2 - Z^2) Y,  dZ/dt = chi N (Y^2 - X^2) Z

TAT model, H = chi (JyJz + JzJy).  Not tabulated anywhere we rely on; derived
here from i[H, Jx] = 2chi(Jz^2 - Jy^2), i[H, Jy] = chi{Jx, Jy},
i[H, Jz] = -chi{Jx, Jz}, which at mean-field level (j = N/2) give

    dX/dt = chi N (Z^2 - Y^2),  dY/dt = chi N X Y,  dZ/dt = -chi N X Z

with fixed points (+-1, 0, 0) and (0, +-1/sqrt2, +-1/sqrt2) but none at the
y poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlochPoint:
    X: float
    Y: float
    Z: float

    def __post_init__(self):
        n = math.sqrt(self.X**2 + self.Y**2 + self.Z**2)
        if abs(n - 1) > 1e-9:
            raise ValueError(f"Bloch point not on the unit sphere (|p| = {n})")

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z])

    @classmethod
    def from_array(cls, v) -> "BlochPoint":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(float(v[0]), float(v[1]), float(v[2]))


def _xyz_velocity(v: np.ndarray, rate: float) -> np.ndarray:
    x, y, z = v
    return rate * np.array([(z * z - y * y) * x, (x * x - z * z) * y, (y * y - x * x) * z])


def _tat_velocity(v: np.ndarray, rate: float) -> np.ndarray:
    x, y, z = v
    return rate * np.array([z * z - y * y, x * y, -x * z])


_FLOWS = {"xyz": _xyz_velocity, "tat": _tat_velocity}


def mean_field_flow(p, chi_xyz: float, N: int, model: str = "xyz") -> np.ndarray:
    """Velocity of the mean-field flow at ``p`` (BlochPoint or 3-vector)."""
    v = p.as_array() if isinstance(p, BlochPoint) else np.asarray(p, dtype=float)
    return _FLOWS[model](v, chi_xyz * N)


@dataclass
class SemiclassicalTrajectory:
    times: np.ndarray
    points: np.ndarray  # shape (n, 3)
    # largest |p| - 1 before each projection back onto the sphere
    norm_drift: float

    def bloch_points(self) -> list[BlochPoint]:
        return [BlochPoint.from_array(p) for p in self.points]


def integrate_trajectory(p0, chi_xyz: float, N: int, t_end: float, n_steps: int,
                         model: str = "xyz") -> SemiclassicalTrajectory:
    """Fixed-step RK4 with projection onto the unit sphere after every step."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    flow = _FLOWS[model]
    rate = chi_xyz * N
    v = p0.as_array() if isinstance(p0, BlochPoint) else np.asarray(p0, dtype=float)
    if t_end == 0:
        return SemiclassicalTrajectory(np.array([0.0]), v[None, :].copy(), 0.0)
    h = t_end / n_steps
    pts = np.empty((n_steps + 1, 3))
    pts[0] = v
    drift = 0.0
    for i in range(n_steps):
        k1 = flow(v, rate)
        k2 = flow(v + 0.5 * h * k1, rate)
        k3 = flow(v + 0.5 * h * k2, rate)
        k4 = flow(v + h * k3, rate)
        v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        n = np.linalg.norm(v)
        drift = max(drift, abs(n - 1))
        v = v / n
        pts[i + 1] = v
    return SemiclassicalTrajectory(np.linspace(0, t_end, n_steps + 1), pts, drift)


def critical_time(N: int, chi_xyz: float = 1.0) -> dict:
    """GHZ-like generation time: ln N/(chi N) and the edge-to-edge value ln(N-1)/(chi N)."""
    if N < 2:
        raise ValueError("critical time needs N >= 2")
    return {"approx": math.log(N) / (chi_xyz * N), "exact": math.log(N - 1) / (chi_xyz * N)}


def floquet_critical_time(N: int, alpha: float, chi: float = 1.0) -> float:
    """3 ln N / (alpha N chi): the XYZ time with chi_eff = alpha chi / 3."""
    return 3 * math.log(N) / (alpha * N * chi)


def qfi_semiclassical(t, N: int, chi_xyz: float = 1.0):
    """N^2 / (1 + (N-1) exp(-2 chi N t)), from Y0 = 1/sqrt(N)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = N**2 / (1 + (N - 1) * np.exp(-2 * chi_xyz * N * t))
    return float(out) if out.ndim == 0 else out


def fixed_points(model: str = "xyz") -> list[np.ndarray]:
    if model == "xyz":
        return [s * e for e in np.eye(3) for s in (1, -1)]
    if model == "tat":
        r = 1 / math.sqrt(2)
        pts = [np.array([s, 0.0, 0.0]) for s in (1, -1)]
        pts += [np.array([0.0, sy * r, sz * r]) for sy in (1, -1) for sz in (1, -1)]
        return pts
    raise ValueError(f"unknown model {model!r}")
