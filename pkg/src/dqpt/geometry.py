"""State-space distances: Wootters angle, Uhlmann fidelity, Bures angle.

The Bures angle between the initial state and its quench evolution is the
geometric quantity the entropy-production bound feeds on.  For pure states
it collapses to arccos of the overlap magnitude; for thermal states the
fidelity is evaluated from the nuclear norm of sqrt(rho0) U_t sqrt(rho0),
which needs only the two Hamiltonian eigendecompositions already at hand
(no general matrix square root, no per-point re-diagonalization of a full
d x d product when the thermal spectrum is effectively low rank).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import PreparedQuench, QuenchSpec, overlap_amplitudes, prepare_quench
from .errors import ConfigError, NumericalFault
from .spectral import DensityMatrix, boltzmann_weights, diagonalize

__all__ = [
    "BuresSeries",
    "wootters_distance",
    "uhlmann_fidelity",
    "bures_angle",
    "bures_from_rate",
    "bures_series",
]

# roundoff excursions beyond [0, 1] larger than this indicate an upstream
# numerical fault and are never silently clamped
CLAMP_TOL = 1e-8


def _clamp_unit(value: float, label: str) -> float:
    if value > 1.0 + CLAMP_TOL or value < -CLAMP_TOL:
        raise NumericalFault(f"{label} = {value!r} lies outside [0, 1] beyond {CLAMP_TOL}")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class BuresSeries:
    """Bures angle along a quench trajectory.

    `reference` records which state the evolved one is compared against:
    "initial" (the t = 0 state, so angle[0] = 0) or "equilibrium" (the
    post-quench Gibbs state, generally nonzero at t = 0).
    """

    times: np.ndarray
    angle: np.ndarray
    protocol: str  # "pure" | "thermal"
    reference: str = "initial"

    def __post_init__(self):
        if self.protocol not in ("pure", "thermal"):
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.reference not in ("initial", "equilibrium"):
            raise ConfigError(f"unknown reference {self.reference!r}")
        if self.angle.min() < -1e-12 or self.angle.max() > np.pi / 2 + 1e-12:
            raise NumericalFault("Bures angles escaped [0, pi/2]")
        if self.reference == "initial" and abs(self.angle[0]) > 1e-8:
            raise NumericalFault(
                f"angle at t=0 is {self.angle[0]!r}, expected 0 for the initial reference"
            )


def wootters_distance(psi1: np.ndarray, psi2: np.ndarray) -> float:
    """Angle arccos |<psi1|psi2>| between pure states (global-phase invariant)."""
    for name, psi in (("psi1", psi1), ("psi2", psi2)):
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise ConfigError(f"{name} has norm {norm}, expected 1 within 1e-10")
    overlap = abs(np.vdot(psi1, psi2))
    return float(np.arccos(_clamp_unit(overlap, "pure-state overlap")))


def uhlmann_fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """F(rho1, rho2) = [Tr(sqrt(rho1) rho2 sqrt(rho1))^(1/2)]^2.

    Eigenvalues of the inner product matrix below -1e-8 signal invalid
    input and raise; small negatives from roundoff are clamped to zero.
    """
    if rho1.dim != rho2.dim:
        raise ConfigError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    spec1 = diagonalize(rho1.rho)
    sqrt1 = spec1.matrix_function(lambda e: np.sqrt(np.maximum(e, 0.0)))
    inner = sqrt1 @ rho2.rho @ sqrt1
    mu = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    if mu.min() < -1e-8:
        raise NumericalFault(
            f"sqrt(rho1) rho2 sqrt(rho1) has eigenvalue {mu.min():.3e} < -1e-8"
        )
    fid = float(np.sqrt(np.maximum(mu, 0.0)).sum() ** 2)
    if fid > 1.0 + CLAMP_TOL:
        raise NumericalFault(f"fidelity {fid!r} exceeds 1 beyond {CLAMP_TOL}")
    return fid


def bures_angle(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """arccos sqrt(F); a genuine metric on density matrices."""
    fid = uhlmann_fidelity(rho1, rho2)
    return float(np.arccos(np.sqrt(_clamp_unit(fid, "fidelity"))))


def bures_from_rate(rate, system_size: int):
    """Bures angle arccos exp(-N lambda / 2) from the rate function.

    For the pure protocol this reproduces the direct Wootters distance
    between the initial and evolved states.  Accepts scalars or arrays;
    rates below -1e-12 are rejected, roundoff negatives are treated as 0.
    """
    if system_size < 1:
        raise ConfigError(f"system size must be >= 1, got {system_size}")
    lam = np.asarray(rate, dtype=float)
    if lam.min() < -1e-12:
        raise ConfigError(f"negative rate {lam.min()!r} is outside the domain")
    angle = np.arccos(np.exp(-0.5 * system_size * np.maximum(lam, 0.0)))
    return float(angle) if np.isscalar(rate) else angle


def _pure_angle_series(prep: PreparedQuench, times: np.ndarray) -> np.ndarray:
    evals = prep.spec_final.eigenvalues
    coeff = prep.spec_final.eigenvectors.conj().T @ prep.psi0
    weights = np.abs(coeff) ** 2
    weights /= weights.sum()
    overlap = np.abs(overlap_amplitudes(evals, weights.astype(complex), times))
    angle = np.arccos(np.minimum(overlap, 1.0))
    if overlap.max() > 1.0 + CLAMP_TOL:
        raise NumericalFault(f"overlap {overlap.max()!r} exceeds 1 beyond {CLAMP_TOL}")
    angle[0] = 0.0  # U(0) is the identity; the state is compared to itself
    return angle


def _truncated_gibbs(eigenvalues, beta, weight_cutoff):
    """Kept eigenindex mask and renormalized Gibbs weights."""
    w = boltzmann_weights(eigenvalues, beta)
    if weight_cutoff > 0:
        keep = w > weight_cutoff * w.max()
    else:
        keep = np.ones(w.shape[0], dtype=bool)
    kept = w[keep]
    return keep, kept / kept.sum()


def _thermal_angle_series(
    prep: PreparedQuench,
    beta: float,
    times: np.ndarray,
    reference: str,
    weight_cutoff: float,
) -> np.ndarray:
    """Bures angles of a unitarily evolved Gibbs state.

    Fidelity against the initial state: the singular values of
    sqrt(rho0) U_t sqrt(rho0) are those of L^(1/2) G P_t G^dag L^(1/2),
    with L the Gibbs weights of H0, G the r x d basis-change block into the
    final eigenbasis, and P_t the evolution phases.  Gibbs weights below
    weight_cutoff relative to the largest carry no fidelity mass at double
    precision and are dropped (pass 0 to keep the full spectrum).
    """
    spec0, specf = prep.spec_initial, prep.spec_final
    keep0, lam = _truncated_gibbs(spec0.eigenvalues, beta, weight_cutoff)
    q0 = spec0.eigenvectors[:, keep0]
    g_block = q0.conj().T @ specf.eigenvectors  # r0 x d
    sqrt_lam = np.sqrt(lam)

    angles = np.empty(times.shape[0])
    if reference == "initial":
        left = sqrt_lam[:, None] * g_block
        right = (sqrt_lam[:, None] * g_block).conj()
        for i, t in enumerate(times):
            if t == 0:
                angles[i] = 0.0
                continue
            core = (left * np.exp(-1j * specf.eigenvalues * t)) @ right.T
            root_f = np.linalg.svd(core, compute_uv=False).sum()
            angles[i] = np.arccos(_clamp_unit(root_f, "sqrt-fidelity"))
        return angles

    # equilibrium reference: compare rho_t against the Gibbs state of the
    # final Hamiltonian at the same beta (diagonal in the final eigenbasis)
    keepf, mu = _truncated_gibbs(specf.eigenvalues, beta, weight_cutoff)
    b_block = g_block[:, keepf] * np.sqrt(mu)[None, :]
    evals_kept = specf.eigenvalues[keepf]
    for i, t in enumerate(times):
        m = sqrt_lam[:, None] * (b_block * np.exp(1j * evals_kept * t)[None, :])
        root_f = np.linalg.svd(m, compute_uv=False).sum()
        angles[i] = np.arccos(_clamp_unit(root_f, "sqrt-fidelity"))
    return angles


def bures_series(
    quench: QuenchSpec,
    prepared: Optional[PreparedQuench] = None,
    reference: str = "initial",
    weight_cutoff: float = 1e-14,
) -> BuresSeries:
    """Bures angle over the quench time grid.

    Pure protocol (no beta): Wootters distance between the even-parity
    ground state of H(h0) and its evolution.  Thermal protocol: Bures angle
    of the evolved Gibbs state, against either the initial state (default)
    or the post-quench equilibrium state ("equilibrium").
    """
    if reference not in ("initial", "equilibrium"):
        raise ConfigError(f"unknown reference {reference!r}")
    prep = prepared if prepared is not None else prepare_quench(quench)
    times = quench.tgrid.times
    if quench.beta is None:
        if reference == "equilibrium":
            raise ConfigError(
                "the equilibrium reference needs beta to define the Gibbs state"
            )
        angle = _pure_angle_series(prep, times)
        return BuresSeries(times=times, angle=angle, protocol="pure")
    angle = _thermal_angle_series(prep, quench.beta, times, reference, weight_cutoff)
    return BuresSeries(times=times, angle=angle, protocol="thermal", reference=reference)
