"""Collective-spin algebra on the symmetric (Dicke) subspace of N spin-1/2 particles.

Basis ordering is fixed throughout the package: index ``k = 0..N`` holds
``|j, m>`` with ``m = j - k``, so index 0 is the north pole ``m = +j``.

Coherent spin states use

    <j,m|theta,phi> = sqrt(C(2j, j+m)) cos^(j+m)(theta/2) sin^(j-m)(theta/2) exp(+i (j-m) phi)

which places the mean spin at the Bloch direction (theta, phi) given
``Jy = (J+ - J-) / 2i``.  Every overlap / Husimi routine uses this same phase.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

# Loose enough to absorb accumulated round-off from long propagations.
NORM_TOL = 1e-8
HERM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Dicke-basis operators for N spin-1/2 particles (total spin j = N/2)."""

    N: int
    jx: np.ndarray = field(repr=False)
    jy: np.ndarray = field(repr=False)
    jz: np.ndarray = field(repr=False)
    jp: np.ndarray = field(repr=False)
    jm: np.ndarray = field(repr=False)
    j2: np.ndarray = field(repr=False)

    @property
    def j(self) -> float:
        return self.N / 2

    @property
    def dim(self) -> int:
        return self.N + 1

    @property
    def m(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (j, j-1, ..., -j)."""
        return self.j - np.arange(self.dim)

    def index(self, m: float) -> int:
        """Basis index of |m>."""
        k = self.j - m
        if abs(k - round(k)) > 1e-9 or not 0 <= round(k) <= self.N:
            raise ValueError(f"m={m} is not a valid magnetic number for j={self.j}")
        return int(round(k))

    def op(self, axis) -> np.ndarray:
        """Spin component ``n . J`` for axis 'x'|'y'|'z' or a 3-vector."""
        if isinstance(axis, str):
            try:
                return {"x": self.jx, "y": self.jy, "z": self.jz}[axis]
            except KeyError:
                raise ValueError(f"unknown axis {axis!r}") from None
        n = unit_vector(axis)
        return n[0] * self.jx + n[1] * self.jy + n[2] * self.jz


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")

    @classmethod
    def wrapped(cls, theta: float, phi: float) -> "BlochAngles":
        """Build from arbitrary phi by reducing it modulo 2pi."""
        return cls(theta, float(np.mod(phi, 2 * math.pi)))

    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True, eq=False)
class PureState:
    system: SpinSystem
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.system.dim,):
            raise ValueError(f"amplitude vector has shape {amps.shape}, expected ({self.system.dim},)")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |c|^2 = {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def N(self) -> int:
        return self.system.N

    def expect(self, op: np.ndarray) -> complex:
        return np.vdot(self.amplitudes, op @ self.amplitudes)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.system, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> str:
        return json.dumps({
            "N": self.N,
            "amplitudes": [{"re": float(c.real), "im": float(c.imag)} for c in self.amplitudes],
        })

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        data = json.loads(text)
        amps = np.array([complex(a["re"], a["im"]) for a in data["amplitudes"]])
        return cls(build_system(int(data["N"])), amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    system: SpinSystem
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        d = self.system.dim
        if rho.shape != (d, d):
            raise ValueError(f"density matrix has shape {rho.shape}, expected ({d}, {d})")
        if np.abs(rho - rho.conj().T).max() > HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        rho.flags.writeable = False
        object.__setattr__(self, "matrix", rho)

    @property
    def N(self) -> int:
        return self.system.N

    def expect(self, op: np.ndarray) -> complex:
        return np.einsum("ij,ji->", op, self.matrix)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


State = Union[PureState, DensityMatrix]


def unit_vector(axis) -> np.ndarray:
    if isinstance(axis, BlochAngles):
        return axis.vector()
    if isinstance(axis, str):
        return {"x": np.array([1.0, 0, 0]), "y": np.array([0, 1.0, 0]), "z": np.array([0, 0, 1.0])}[axis]
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if n.shape != (3,) or norm == 0:
        raise ValueError(f"axis must be a nonzero 3-vector, got {axis!r}")
    return n / norm


def _check_particle_number(N) -> int:
    if isinstance(N, bool) or not float(N).is_integer():
        raise ValueError(f"particle number must be an integer, got {N!r}")
    N = int(N)
    if N < 1:
        raise ValueError(f"particle number must be positive, got {N}")
    return N


def build_system(N: int) -> SpinSystem:
    """Collective spin operators for N spin-1/2 particles in the Dicke basis."""
    return _build_system(_check_particle_number(N))


@lru_cache(maxsize=64)
def _build_system(N: int) -> SpinSystem:
    j = N / 2
    m = j - np.arange(N + 1)
    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one index above |m>
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(up, k=1).astype(complex)
    jm = jp.conj().T.copy()
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(m).astype(complex)
    j2 = jx @ jx + jy @ jy + jz @ jz
    for a in (jx, jy, jz, jp, jm, j2):
        a.flags.writeable = False
    return SpinSystem(N, jx, jy, jz, jp, jm, j2)


def coherent_amplitudes(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """Amplitudes <j,m|theta,phi> in basis order; stable for large N (log space)."""
    N = sys.N
    k = np.arange(N + 1)  # k = j - m spins down
    log_binom = 0.5 * np.array([math.lgamma(N + 1) - math.lgamma(i + 1) - math.lgamma(N - i + 1) for i in k])
    c, s = math.cos(theta / 2), math.sin(theta / 2)

    def log_pow(base, expo):
        # 0**0 == 1
        with np.errstate(divide="ignore"):
            return np.where(expo == 0, 0.0, expo * np.log(abs(base)) if base != 0 else -np.inf)

    mag = np.exp(log_binom + log_pow(c, N - k) + log_pow(s, k))
    return mag * np.exp(1j * k * phi)


def coherent_state(sys: SpinSystem, angles: BlochAngles) -> PureState:
    return PureState(sys, coherent_amplitudes(sys, angles.theta, angles.phi))


def x_polarized(sys: SpinSystem) -> PureState:
    """Coherent state along +x, i.e. Jx|x> = j|x>."""
    return coherent_state(sys, BlochAngles(math.pi / 2, 0.0))


def dicke_state(sys: SpinSystem, m: float) -> PureState:
    amps = np.zeros(sys.dim, dtype=complex)
    amps[sys.index(m)] = 1.0
    return PureState(sys, amps)


def ghz_state(sys: SpinSystem) -> PureState:
    """(|j> + |-j>)/sqrt(2)."""
    amps = np.zeros(sys.dim, dtype=complex)
    amps[[0, -1]] = 1 / math.sqrt(2)
    return PureState(sys, amps)


def aghz_state(sys: SpinSystem) -> PureState:
    """Approximate GHZ state: equal weight on m = +-j and m = +-(j-1)."""
    if sys.N < 2:
        raise ValueError("approximate GHZ state needs N >= 2")
    amps = np.zeros(sys.dim, dtype=complex)
    idx = sorted({0, 1, sys.dim - 2, sys.dim - 1})
    amps[idx] = 1 / math.sqrt(len(idx))
    return PureState(sys, amps)


def parity_matrix(sys: SpinSystem) -> np.ndarray:
    """Parity prod_k sigma_z^(k), diagonal (-1)^(j-m) in the Dicke basis.

    For N/2 even this coincides with (-1)^m; for N/2 odd the two differ by a
    global sign, and only the product-of-sigma_z form gives <Pi(theta=0)> = 1
    for states of the form d_0|0> + sum d_m(|m> + |-m>).  The (-1)^(j-m) form
    is also real for odd N.
    """
    return np.diag((-1.0) ** np.arange(sys.dim)).astype(complex)


def rotation_matrix(sys: SpinSystem, axis, angle: float) -> np.ndarray:
    """exp(-i * angle * n.J)."""
    return _rotation(sys, _axis_key(axis), float(angle))


def _axis_key(axis):
    if isinstance(axis, str):
        if axis not in ("x", "y", "z"):
            raise ValueError(f"unknown axis {axis!r}")
        return axis
    return tuple(unit_vector(axis).tolist())


@lru_cache(maxsize=256)
def _eig_of_component(sys: SpinSystem, key):
    op = sys.op(key if isinstance(key, str) else np.array(key))
    return np.linalg.eigh(op)


def _rotation(sys: SpinSystem, key, angle: float) -> np.ndarray:
    if key == "z":
        return np.diag(np.exp(-1j * angle * sys.m))
    w, v = _eig_of_component(sys, key)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def mean_spin(state: State) -> np.ndarray:
    sys = state.system
    return np.array([state.expect(a).real for a in (sys.jx, sys.jy, sys.jz)])
