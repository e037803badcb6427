"""Particle loss from permutation-symmetric states.

Tracing one particle out of a state in the spin-j symmetric sector leaves a
state in the spin-(j - 1/2) symmetric sector.  The channel has two Kraus maps,
for the lost particle being up or down:

    A_up |j, m>   = sqrt((j + m) / 2j) |j - 1/2, m - 1/2>
    A_down |j, m> = sqrt((j - m) / 2j) |j - 1/2, m + 1/2>
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spin import DensityMatrix, PureState, State, build_system


@dataclass(frozen=True)
class LossResult:
    rho: DensityMatrix
    lost: int


@lru_cache(maxsize=512)
def _kraus(N: int):
    j = N / 2
    m = j - np.arange(N + 1)
    a_up = np.zeros((N, N + 1))
    a_down = np.zeros((N, N + 1))
    for k in range(N + 1):
        # |m - 1/2> on N-1 particles has index k; |m + 1/2> has index k - 1
        if k < N:
            a_up[k, k] = np.sqrt((j + m[k]) / (2 * j))
        if k > 0:
            a_down[k - 1, k] = np.sqrt((j - m[k]) / (2 * j))
    return a_up, a_down


def lose_one(rho: State) -> DensityMatrix:
    """Trace out one particle: density matrix on N particles -> N - 1."""
    if isinstance(rho, PureState):
        rho = rho.to_density()
    N = rho.system.N
    if N < 2:
        raise ValueError("need at least two particles to lose one")
    a_up, a_down = _kraus(N)
    r = rho.matrix
    out = a_up @ r @ a_up.T + a_down @ r @ a_down.T
    return DensityMatrix(build_system(N - 1), 0.5 * (out + out.conj().T))


def lose_particles(rho: State, delta_n: int) -> LossResult:
    if isinstance(rho, PureState):
        rho = rho.to_density()
    N = rho.system.N
    if int(delta_n) != delta_n or not 0 <= delta_n <= N - 1:
        raise ValueError(f"delta_n must be an integer in [0, {N - 1}], got {delta_n}")
    for _ in range(int(delta_n)):
        rho = lose_one(rho)
    return LossResult(rho, int(delta_n))
