"""Hermitian eigendecomposition and everything layered on it.

Covers the LMG Hamiltonian assembly, Z2 parity, the (quasi-)degenerate
ground manifold, Gibbs states, and the dynamical critical field.  A single
dense diagonalization is the engine for both time evolution (exp(-iHt))
and thermal weights (exp(-beta H)); nothing here ever Trotterizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalFault
from .spinops import CollectiveSpinOps, SpinQuantumNumber

__all__ = [
    "LMGParams",
    "SpectralDecomposition",
    "DensityMatrix",
    "GroundManifold",
    "build_lmg_hamiltonian",
    "diagonalize",
    "parity_operator",
    "ground_manifold",
    "thermal_state",
    "dynamical_critical_field",
    "EVEN",
    "ODD",
]

# parity sector labels: eigenvalues of the spin-flip operator
EVEN = +1
ODD = -1


@dataclass(frozen=True)
class LMGParams:
    """Couplings of H = -2h J_z - (g/j)(J_x^2 + gamma J_y^2)."""

    h: float
    gamma: float
    g: float
    j: SpinQuantumNumber

    def __post_init__(self):
        if self.g == 0:
            raise ConfigError("g must be nonzero; it sets the energy scale")
        if not np.isfinite(self.gamma):
            raise ConfigError(f"gamma must be finite, got {self.gamma}")
        if not np.isfinite(self.h):
            raise ConfigError(f"h must be finite, got {self.h}")

    def with_h(self, h: float) -> "LMGParams":
        return LMGParams(h=h, gamma=self.gamma, g=self.g, j=self.j)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a
    Hermitian matrix: H = V diag(E) V^dagger."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def matrix_function(self, f) -> np.ndarray:
        """V f(E) V^dagger for a scalar function f applied to the spectrum."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ v.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.matrix_function(lambda e: e)


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive-semidefinite Hermitian matrix.

    Construction checks Hermiticity and trace; call assert_valid() for the
    O(d^3) positivity check (tests do, hot loops do not).
    """

    rho: np.ndarray

    def __post_init__(self):
        r = self.rho
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ConfigError(f"density matrix must be square, got shape {r.shape}")
        if np.abs(r - r.conj().T).max() > 1e-12:
            raise NumericalFault("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(r).real - 1.0) > 1e-10 or abs(np.trace(r).imag) > 1e-10:
            raise NumericalFault(f"density matrix trace {np.trace(r)} != 1 within 1e-10")

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def assert_valid(self, floor: float = -1e-12):
        evals = np.linalg.eigvalsh(self.rho)
        if evals.min() < floor:
            raise NumericalFault(
                f"density matrix has eigenvalue {evals.min():.3e} below {floor:.0e}"
            )


@dataclass(frozen=True)
class GroundManifold:
    """Lowest-energy state of each parity sector plus their energy splitting."""

    states: tuple  # ((parity, vector, energy), ...) ordered even then odd
    degeneracy_gap: float

    def state(self, parity: int) -> np.ndarray:
        for p, vec, _ in self.states:
            if p == parity:
                return vec
        raise ConfigError(f"no state with parity {parity}")

    def energy(self, parity: int) -> float:
        for p, _, e in self.states:
            if p == parity:
                return e
        raise ConfigError(f"no state with parity {parity}")


def build_lmg_hamiltonian(params: LMGParams, ops: CollectiveSpinOps) -> np.ndarray:
    """H = -2h J_z - (g/j)(J_x^2 + gamma J_y^2) on the spin-j sector."""
    if ops.j != params.j:
        raise ConfigError(
            f"spin mismatch: operators built for twice_j={ops.j.twice_j}, "
            f"params carry twice_j={params.j.twice_j}"
        )
    jj = params.j.j
    h = -2.0 * params.h * ops.jz - (params.g / jj) * (
        ops.jx @ ops.jx + params.gamma * (ops.jy @ ops.jy)
    )
    # exact Hermitization; the anti-Hermitian part is pure roundoff
    return (h + h.conj().T) / 2.0


def diagonalize(hmat: np.ndarray) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix (ascending eigenvalues).

    Non-Hermitian input and solver failure both raise; nothing is silently
    approximated.
    """
    scale = max(1.0, np.abs(hmat).max())
    herm_defect = np.abs(hmat - hmat.conj().T).max()
    if herm_defect > 1e-10 * scale:
        raise NumericalFault(
            f"matrix is not Hermitian: max |H - H^dag| = {herm_defect:.3e}"
        )
    try:
        evals, evecs = np.linalg.eigh(hmat)
    except np.linalg.LinAlgError as exc:
        raise NumericalFault(f"eigensolver failed to converge: {exc}") from exc
    return SpectralDecomposition(eigenvalues=evals, eigenvectors=evecs)


def parity_operator(j: SpinQuantumNumber) -> np.ndarray:
    """Spin-flip parity Pi = diag((-1)^(j+m)) in the ascending-m basis.

    j + m = 0, 1, ..., 2j along the basis, so the diagonal alternates
    +1, -1, +1, ...  Pi^2 = I and [Pi, H_LMG] = 0 because the Hamiltonian
    only couples m to m and m +/- 2.
    """
    signs = np.where(np.arange(j.dim) % 2 == 0, 1.0, -1.0)
    return np.diag(signs.astype(complex))


def _sector_indices(pi: np.ndarray, parity: int) -> np.ndarray:
    diag = np.real(np.diag(pi))
    if np.abs(np.abs(diag) - 1.0).max() > 1e-12 or np.abs(pi - np.diag(np.diag(pi))).max() > 1e-12:
        raise ConfigError("parity operator must be diagonal with +/-1 entries")
    return np.nonzero(np.sign(diag) == parity)[0]


def ground_manifold(spec: SpectralDecomposition, pi: np.ndarray) -> GroundManifold:
    """Lowest-energy eigenstate of each parity sector.

    Eigenvectors are projected onto the (coordinate-mask) parity eigenspaces
    of the diagonal Pi, so the returned vectors are exact parity eigenstates
    even when the two sectors are degenerate below eigensolver resolution
    and eigh hands back arbitrarily mixed pairs.
    """
    picks = {}
    for parity in (EVEN, ODD):
        idx = _sector_indices(pi, parity)
        if idx.size == 0:
            raise NumericalFault(f"parity sector {parity:+d} is empty")
        for k in range(spec.dim):
            component = spec.eigenvectors[idx, k]
            weight = float(np.vdot(component, component).real)
            if weight > 1e-8:
                vec = np.zeros(spec.dim, dtype=complex)
                vec[idx] = component / np.sqrt(weight)
                picks[parity] = (parity, vec, float(spec.eigenvalues[k]))
                break
        else:
            raise NumericalFault(f"no eigenstate has weight in parity sector {parity:+d}")
    gap = abs(picks[EVEN][2] - picks[ODD][2])
    return GroundManifold(states=(picks[EVEN], picks[ODD]), degeneracy_gap=gap)


def thermal_state(spec: SpectralDecomposition, beta: float) -> DensityMatrix:
    """Gibbs state exp(-beta H)/Z from an existing decomposition.

    The ground energy is subtracted before exponentiation; the state is
    shift-invariant and the subtraction eliminates overflow at any beta.
    """
    if beta < 0:
        raise ConfigError(f"beta must be >= 0, got {beta}")
    weights = boltzmann_weights(spec.eigenvalues, beta)
    v = spec.eigenvectors
    rho = (v * weights) @ v.conj().T
    return DensityMatrix(rho=(rho + rho.conj().T) / 2.0)


def boltzmann_weights(eigenvalues: np.ndarray, beta: float) -> np.ndarray:
    """Normalized Gibbs weights exp(-beta (E - E_min)) / Z."""
    if beta < 0:
        raise ConfigError(f"beta must be >= 0, got {beta}")
    shifted = np.asarray(eigenvalues, dtype=float) - float(np.min(eigenvalues))
    w = np.exp(-beta * shifted)
    return w / w.sum()


def dynamical_critical_field(h0: float, g: float) -> float:
    """Critical final field h_c^d = (h0 + g)/2 for a quench starting at h0."""
    return (h0 + g) / 2.0
