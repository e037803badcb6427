"""Hamiltonians of the collective-spin models: OAT, TAT, XYZ, TNT and cavity OAT."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin import SpinSystem

MODELS = ("oat", "tat", "xyz", "tnt", "cavity-oat")


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    system: SpinSystem
    matrix: np.ndarray = field(repr=False)
    label: str
    params: dict

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        if h.shape != (self.system.dim, self.system.dim):
            raise ValueError("Hamiltonian shape does not match the spin system")
        if np.abs(h - h.conj().T).max() > 1e-10 * max(1.0, np.abs(h).max()):
            raise ValueError(f"{self.label} Hamiltonian is not Hermitian")
        h.flags.writeable = False
        object.__setattr__(self, "matrix", h)


def h_oat(sys: SpinSystem, chi: float) -> Hamiltonian:
    """chi * Jz^2."""
    return Hamiltonian(sys, chi * sys.jz @ sys.jz, "OAT", {"chi": chi})


def h_tat(sys: SpinSystem, chi: float) -> Hamiltonian:
    """chi * (Jy Jz + Jz Jy)."""
    return Hamiltonian(sys, chi * (sys.jy @ sys.jz + sys.jz @ sys.jy), "TAT", {"chi": chi})


def h_xyz(sys: SpinSystem, chi_xyz: float) -> Hamiltonian:
    """(2 chi / N) (Jx Jy Jz + Jz Jy Jx)."""
    triple = sys.jx @ sys.jy @ sys.jz
    mat = (2 * chi_xyz / sys.N) * (triple + triple.conj().T)
    return Hamiltonian(sys, mat, "XYZ", {"chi": chi_xyz})


def default_tnt_omega(sys: SpinSystem, chi: float) -> float:
    return chi * sys.N / 2


def h_tnt(sys: SpinSystem, chi: float, omega: float | None = None) -> Hamiltonian:
    """Twist-and-turn chi Jy^2 + Omega Jx; Omega defaults to chi N / 2."""
    if omega is None:
        omega = default_tnt_omega(sys, chi)
    mat = chi * sys.jy @ sys.jy + omega * sys.jx
    return Hamiltonian(sys, mat, "TNT", {"chi": chi, "omega": omega})


def h_cavity_oat(sys: SpinSystem, chi: float) -> Hamiltonian:
    """Cavity-mediated chi (J^2 - Jz^2)."""
    j = sys.j
    mat = chi * np.diag(j * (j + 1) - sys.m**2).astype(complex)
    return Hamiltonian(sys, mat, "CAVITY_OAT", {"chi": chi})


def build_model(sys: SpinSystem, name: str, chi: float, omega: float | None = None) -> Hamiltonian:
    """Select a Hamiltonian by its CLI name."""
    if name == "oat":
        return h_oat(sys, chi)
    if name == "tat":
        return h_tat(sys, chi)
    if name == "xyz":
        return h_xyz(sys, chi)
    if name == "tnt":
        return h_tnt(sys, chi, omega)
    if name == "cavity-oat":
        return h_cavity_oat(sys, chi)
    raise ValueError(f"unknown model {name!r}; expected one of {', '.join(MODELS)}")


def xyz_matrix_elements(j: float, m: float) -> tuple[float, float]:
    """Ladder coefficients (A, B) of the XYZ Hamiltonian at |j, m>.

    A = m sqrt((j-m)(j-m-1)(j+m+1)(j+m+2)) multiplies |m+2><m| and
    B = m sqrt((j+m)(j+m-1)(j-m+1)(j-m+2)) multiplies |m-2><m|.
    """
    if abs(m) > j + 1e-12:
        raise ValueError(f"|m| = {abs(m)} exceeds j = {j}")
    a = (j - m) * (j - m - 1) * (j + m + 1) * (j + m + 2)
    b = (j + m) * (j + m - 1) * (j - m + 1) * (j - m + 2)
    # factors vanish exactly at the ladder ends; clip tiny negatives from rounding
    return m * math.sqrt(max(a, 0.0)), m * math.sqrt(max(b, 0.0))


def h_xyz_from_elements(sys: SpinSystem, chi_xyz: float) -> np.ndarray:
    """XYZ matrix assembled from the (A, B) ladder coefficients.

    H = chi/(2iN) sum_m [A|m+2><m| - B|m-2><m| - 2m^2 |m><m|] + h.c.

    The B term enters with a minus sign; with a plus sign the sum does not
    reproduce (2chi/N)(JxJyJz + JzJyJx).  The diagonal cancels against its
    conjugate and is kept only to mirror the ladder decomposition.
    """
    j, N = sys.j, sys.N
    k = np.zeros((sys.dim, sys.dim), dtype=complex)
    for col, m in enumerate(sys.m):
        a, b = xyz_matrix_elements(j, m)
        if col - 2 >= 0:
            k[col - 2, col] += a
        if col + 2 < sys.dim:
            k[col + 2, col] -= b
        k[col, col] -= 2 * m**2
    k *= chi_xyz / (2j * N)
    return k + k.conj().T
