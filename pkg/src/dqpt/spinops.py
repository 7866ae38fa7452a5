"""Dense collective spin operators in the maximal-spin (symmetric) sector.

All operators act on the (2j+1)-dimensional |j, m> basis ordered by
ascending m = -j, ..., +j.  This ordering is a package-wide convention;
every other module inherits it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = ["SpinQuantumNumber", "CollectiveSpinOps", "build_spin_ops"]


@dataclass(frozen=True)
class SpinQuantumNumber:
    """Half-integer spin j, stored as twice_j to keep it exactly representable."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, (int, np.integer)):
            raise ConfigError(f"twice_j must be an integer, got {self.twice_j!r}")
        if self.twice_j < 1:
            raise ConfigError(
                f"twice_j must be >= 1 (got {self.twice_j}); the one-dimensional "
                "j=0 space has no collective dynamics"
            )

    @property
    def j(self) -> float:
        return self.twice_j / 2.0

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @classmethod
    def from_j(cls, j: float) -> "SpinQuantumNumber":
        twice_j = round(2 * j)
        if abs(2 * j - twice_j) > 1e-12:
            raise ConfigError(f"j must be integer or half-integer, got {j}")
        return cls(twice_j)


@dataclass(frozen=True)
class CollectiveSpinOps:
    """Matrices J_x, J_y, J_z for spin j (hbar = 1), plus the ladder pair."""

    j: SpinQuantumNumber
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray

    @property
    def dim(self) -> int:
        return self.j.dim


def build_spin_ops(j: SpinQuantumNumber) -> CollectiveSpinOps:
    """Construct the spin-j operator matrices in the ascending-m basis.

    Ladder matrix elements use <m+1|J_+|m> = sqrt(j(j+1) - m(m+1)) evaluated
    directly in double precision (no recursion), then
    J_x = (J_+ + J_-)/2 and J_y = (J_+ - J_-)/(2i).
    """
    jj = j.j
    d = j.dim
    m = np.arange(d, dtype=float) - jj  # ascending m = -j ... +j

    jz = np.diag(m.astype(complex))
    # raising operator: column m couples to row m+1
    ladder = np.sqrt(jj * (jj + 1.0) - m[:-1] * (m[:-1] + 1.0))
    jplus = np.zeros((d, d), dtype=complex)
    jplus[np.arange(1, d), np.arange(d - 1)] = ladder
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j

    return CollectiveSpinOps(j=j, jx=jx, jy=jy, jz=jz, jplus=jplus, jminus=jminus)
