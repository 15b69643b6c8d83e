"""Two-qubit polarization density matrices and entanglement measures.

The cascade populates only the HH and VV amplitudes, so physical states
are X-shaped: diagonal (pHH, 0, 0, pVV) with corner coherences.  General
4x4 density matrices are still accepted so perturbed inputs can be
analyzed; the X-form fast paths must agree with the general solvers.

Basis order is (HH, HV, VH, VV).  Analyzer angles are in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (_SIGMA_X, _SIGMA_Y, _SIGMA_Z)

# Entries allowed to be nonzero in an X-shaped matrix.
_X_PATTERN = ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1))


@dataclass(frozen=True, eq=False)
class TwoQubitDensityMatrix:
    """Validated 4x4 density matrix in the (HH, HV, VH, VV) basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValidationError("density matrix contains non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValidationError("density matrix is not Hermitian to 1e-12")
        if abs(np.trace(m).real - 1.0) > 1e-12 or abs(np.trace(m).imag) > 1e-12:
            raise ValidationError("density matrix trace differs from 1 by > 1e-12")
        if np.min(np.linalg.eigvalsh(m)) < -1e-10:
            raise ValidationError("density matrix has an eigenvalue below -1e-10")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def gamma(self) -> complex:
        """The HH-VV corner coherence."""
        return complex(self.matrix[0, 3])

    def is_x_form(self, tol: float = 1e-14) -> bool:
        mask = np.ones((4, 4), dtype=bool)
        for i, j in _X_PATTERN:
            mask[i, j] = False
        return bool(np.max(np.abs(self.matrix[mask])) <= tol)


@dataclass(frozen=True)
class EntanglementReport:
    """Peres test plus the Horodecki CHSH bound, JSON-serializable."""

    min_pt_eigenvalue: float
    negativity: float
    entangled: bool
    chsh_max: float
    gamma_magnitude: float

    def as_dict(self) -> dict:
        return {
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "negativity": self.negativity,
            "entangled": self.entangled,
            "chsh_max": self.chsh_max,
            "gamma_magnitude": self.gamma_magnitude,
        }


def x_state(p_hh: float, p_vv: float, gamma: complex) -> TwoQubitDensityMatrix:
    """The cascade's state family: HH/VV populations with corner coherence."""
    if p_hh < 0 or p_vv < 0:
        raise ValidationError(f"populations must be >= 0, got {(p_hh, p_vv)!r}")
    if abs(p_hh + p_vv - 1.0) > 1e-12:
        raise ValidationError(
            f"populations must sum to 1, got {p_hh + p_vv!r}")
    gamma = complex(gamma)
    # Reject, never clip: a corner exceeding the populations' geometric
    # mean is not a state.
    if abs(gamma) ** 2 > p_hh * p_vv + 1e-12:
        raise ValidationError(
            f"|gamma|^2 = {abs(gamma) ** 2!r} exceeds pHH*pVV = {p_hh * p_vv!r}")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = p_hh
    m[3, 3] = p_vv
    m[0, 3] = gamma
    m[3, 0] = gamma.conjugate()
    return TwoQubitDensityMatrix(m)


def partial_transpose(rho: TwoQubitDensityMatrix) -> np.ndarray:
    """Transpose over the second qubit; an involution preserving the trace."""
    m = rho.matrix.reshape(2, 2, 2, 2)
    return m.transpose(0, 3, 2, 1).reshape(4, 4)


def _x_pt_eigenvalues(pt: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of an X-shaped Hermitian matrix."""
    out = []
    for i, j in ((0, 3), (1, 2)):
        a = pt[i, i].real
        d = pt[j, j].real
        r = math.hypot((a - d) / 2.0, abs(pt[i, j]))
        mean = (a + d) / 2.0
        out.extend((mean - r, mean + r))
    return np.array(sorted(out))


def correlation_matrix(rho: TwoQubitDensityMatrix) -> np.ndarray:
    """3x3 Pauli correlation matrix T_ij = Tr(rho sigma_i x sigma_j)."""
    t = np.empty((3, 3))
    for i, si in enumerate(_PAULIS):
        for j, sj in enumerate(_PAULIS):
            t[i, j] = np.trace(rho.matrix @ np.kron(si, sj)).real
    return t


def chsh_bound(rho: TwoQubitDensityMatrix) -> float:
    """Largest CHSH value over analyzer settings, 2 sqrt(m1 + m2)."""
    t = correlation_matrix(rho)
    ev = np.linalg.eigvalsh(t.T @ t)
    return 2.0 * math.sqrt(max(ev[-1] + ev[-2], 0.0))


def peres_test(rho: TwoQubitDensityMatrix) -> EntanglementReport:
    """Partial-transpose separability test with negativity and CHSH bound.

    X-shaped input takes the exact 2x2-block solve; anything else goes to
    the Hermitian eigensolver.  For two qubits a negative partial
    transpose is equivalent to entanglement.
    """
    if not isinstance(rho, TwoQubitDensityMatrix):
        rho = TwoQubitDensityMatrix(rho)
    pt = partial_transpose(rho)
    if rho.is_x_form():
        eigs = _x_pt_eigenvalues(pt)
    else:
        eigs = np.linalg.eigvalsh(pt)
    min_eig = float(eigs[0])
    negativity = float(-np.sum(eigs[eigs < 0.0])) if np.any(eigs < 0.0) else 0.0
    return EntanglementReport(
        min_pt_eigenvalue=min_eig,
        negativity=negativity,
        entangled=min_eig < -1e-10,
        chsh_max=chsh_bound(rho),
        gamma_magnitude=abs(rho.gamma),
    )


def _polarizer_projectors(angle: float) -> tuple[np.ndarray, np.ndarray]:
    # Transmission port of a linear polarizer at `angle` from H, and the
    # orthogonal reflection port.
    ket = np.array([math.cos(angle), math.sin(angle)], dtype=complex)
    p0 = np.outer(ket, ket.conj())
    return p0, np.eye(2, dtype=complex) - p0


def born_probabilities(rho: TwoQubitDensityMatrix, angle_a: float,
                       angle_b: float) -> np.ndarray:
    """2x2 outcome probabilities; rows = analyzer A port, cols = B port."""
    pa = _polarizer_projectors(angle_a)
    pb = _polarizer_projectors(angle_b)
    probs = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            probs[i, j] = np.trace(rho.matrix @ np.kron(pa[i], pb[j])).real
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def correlation(rho: TwoQubitDensityMatrix, angle_a: float,
                angle_b: float) -> float:
    """Analytic polarization correlation E(a, b)."""
    p = born_probabilities(rho, angle_a, angle_b)
    return float(p[0, 0] - p[0, 1] - p[1, 0] + p[1, 1])


def chsh_value(rho: TwoQubitDensityMatrix, angles) -> float:
    """CHSH combination E(a,b) + E(a',b) + E(a,b') - E(a',b')."""
    a, a2, b, b2 = angles
    return (correlation(rho, a, b) + correlation(rho, a2, b)
            + correlation(rho, a, b2) - correlation(rho, a2, b2))


def optimal_chsh_angles(gamma: float) -> tuple[float, float, float, float]:
    """Angles maximizing chsh_value for x_state(1/2, 1/2, gamma), real gamma.

    With E(a,b) = cos2a cos2b + 2*gamma sin2a sin2b the optimum is a = 0,
    a' = pi/4 and analyzers B at +-atan(2 gamma)/2, giving 2 sqrt(1+4g^2).
    """
    phi = math.atan(2.0 * gamma) / 2.0
    return (0.0, math.pi / 4.0, phi, -phi)


def correlation_from_counts(counts) -> float:
    """Empirical correlation of one 2x2 coincidence-count table."""
    c = np.asarray(counts, dtype=float)
    total = c.sum()
    if total <= 0:
        raise ValidationError("counts table is empty")
    return float((c[0, 0] - c[0, 1] - c[1, 0] + c[1, 1]) / total)


def sample_coincidences(rho: TwoQubitDensityMatrix, basis_pair, n: int,
                        seed) -> np.ndarray:
    """n seeded coincidence draws at one pair of analyzer angles.

    Returns the 2x2 integer count table; identical (rho, angles, n, seed)
    give identical counts.
    """
    if not (isinstance(n, int) and n >= 1):
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    angle_a, angle_b = basis_pair
    probs = born_probabilities(rho, angle_a, angle_b)
    rng = np.random.default_rng(seed)
    return rng.multinomial(n, probs.ravel()).reshape(2, 2)


def projected_state(params, pairing: str, w, quad=None) -> TwoQubitDensityMatrix:
    """Spectrally filtered two-photon polarization state of the cascade."""
    from .pairstate import DEFAULT_QUAD, gamma_prime

    coh = gamma_prime(params, pairing, w, DEFAULT_QUAD if quad is None else quad)
    s_h = sum(v for k, v in coh.channel_norms.items() if k.startswith("H:"))
    s_v = sum(v for k, v in coh.channel_norms.items() if k.startswith("V:"))
    p_hh = s_h / (s_h + s_v)
    return x_state(p_hh, 1.0 - p_hh, coh.gamma)
