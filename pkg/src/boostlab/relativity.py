"""Relativistic layer: kinematics, boosts, Wigner rotations and their
spin-1 representation, and the 36-dimensional two-particle states.

Units and conventions:

* metric signature (+, -, -, -), mass m = 1, c = 1;
* four-vectors are plain length-4 numpy arrays (t, x, y, z);
* the two-particle Hilbert space is ordered
  (momentum 1, momentum 2, spin 1, spin 2) with dims (2, 2, 3, 3); the
  momentum slots are labelled by the two actual four-momenta, index 0
  standing for the first label and 1 for the second;
* a pure boost with rapidity xi along unit vector e acts on states through
  the Wigner rotation R(Lambda, k) = L^{-1}_{Lambda k} Lambda L_k of each
  momentum label, represented on spin 1 via the standard spherical basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveEnergy, NotRotation, OffShell, OutOfRange
from .linalg import DensityMatrix, kron, multi_kron, partial_trace
from .states import activation_spin_state, rho_b

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

# Cartesian -> spherical change of basis for spin 1; rows are the spin
# components (-1, 0, +1), mapped to qutrit levels (0, 1, 2).
V_SPIN1 = np.array(
    [
        [-1.0, 1j, 0.0],
        [0.0, 0.0, np.sqrt(2.0)],
        [1.0, 1j, 0.0],
    ],
    dtype=complex,
) / np.sqrt(2.0)


def minkowski_sq(k: np.ndarray) -> float:
    """Invariant square k.k with signature (+,-,-,-)."""
    k = np.asarray(k, dtype=float)
    return float(k[0] ** 2 - k[1:] @ k[1:])


def four_momentum(energy: float, sign: int = +1) -> np.ndarray:
    """On-shell four-momentum (1+E, +-|k|, 0, 0) of a unit-mass particle
    with kinetic energy E > 0, momentum along +-x."""
    e = float(energy)
    if e <= 0.0:
        raise NonPositiveEnergy(f"kinetic energy must be positive, got {e}")
    if sign not in (+1, -1):
        raise OutOfRange(f"sign must be +1 or -1, got {sign}")
    return np.array([1.0 + e, sign * np.sqrt(e * (2.0 + e)), 0.0, 0.0])


@dataclass(frozen=True)
class BoostParams:
    """Pure boost: unit direction (normalised on construction) and rapidity."""

    direction: np.ndarray
    rapidity: float

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(3)
        norm = float(np.linalg.norm(d))
        if norm == 0.0:
            raise OutOfRange("boost direction must be a nonzero 3-vector")
        d = d / norm
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "rapidity", float(self.rapidity))


def boost_matrix(b: BoostParams) -> np.ndarray:
    """4x4 pure boost Lambda(e, xi): time row (cosh xi, e^T sinh xi), spatial
    block I + (cosh xi - 1) e e^T."""
    e = b.direction
    ch = np.cosh(b.rapidity)
    sh = np.sinh(b.rapidity)
    lam = np.empty((4, 4))
    lam[0, 0] = ch
    lam[0, 1:] = sh * e
    lam[1:, 0] = sh * e
    lam[1:, 1:] = np.eye(3) + (ch - 1.0) * np.outer(e, e)
    return lam


def standard_boost(k: np.ndarray) -> np.ndarray:
    """Standard boost L_k taking the rest momentum (1,0,0,0) to k (m = 1).

    L_k = [[k0, kvec^T], [kvec, I + kvec kvec^T / (1 + k0)]].
    """
    k = np.asarray(k, dtype=float)
    if abs(minkowski_sq(k) - 1.0) > 1e-10 or k[0] <= 0.0:
        raise OffShell(f"momentum {k} is not on the unit mass shell")
    kv = k[1:]
    lk = np.empty((4, 4))
    lk[0, 0] = k[0]
    lk[0, 1:] = kv
    lk[1:, 0] = kv
    lk[1:, 1:] = np.eye(3) + np.outer(kv, kv) / (1.0 + k[0])
    return lk


def wigner_rotation(b: BoostParams, k: np.ndarray) -> np.ndarray:
    """3x3 Wigner rotation R(Lambda, k) = L^{-1}_{Lambda k} Lambda L_k.

    The 4x4 product must leave the time axis untouched (checked to 1e-10);
    the spatial block is then verified to be a proper rotation.
    """
    lam = boost_matrix(b)
    lk = standard_boost(k)
    l_out = standard_boost(lam @ np.asarray(k, dtype=float))
    r4 = np.linalg.inv(l_out) @ lam @ lk
    time_dev = max(
        float(np.abs(r4[0] - np.array([1.0, 0, 0, 0])).max()),
        float(np.abs(r4[1:, 0]).max()),
    )
    if time_dev > 1e-10:
        raise NotRotation(f"time row/column deviates by {time_dev:.3e}")
    r = r4[1:, 1:]
    _check_rotation(r)
    return r


def _check_rotation(r: np.ndarray, tol: float = 1e-8):
    if np.abs(r @ r.T - np.eye(3)).max() > tol or abs(np.linalg.det(r) - 1.0) > tol:
        raise NotRotation("matrix is not a proper rotation")


def spin1_rep(r: np.ndarray) -> np.ndarray:
    """Unitary spin-1 representation D(R) = V R V^dag of a rotation."""
    r = np.asarray(r, dtype=float)
    _check_rotation(r)
    return V_SPIN1 @ r @ V_SPIN1.conj().T


@dataclass(frozen=True)
class TwoParticleState:
    """Density matrix on (momentum 1, momentum 2, spin 1, spin 2) together
    with the two on-shell momentum labels the discrete slots refer to."""

    momenta: tuple[np.ndarray, np.ndarray]
    rho: DensityMatrix

    def __post_init__(self):
        if self.rho.dims != (2, 2, 3, 3):
            raise OutOfRange(f"two-particle dims must be (2, 2, 3, 3), got {self.rho.dims}")
        moms = []
        for k in self.momenta:
            k = np.asarray(k, dtype=float).reshape(4)
            if abs(minkowski_sq(k) - 1.0) > 1e-10 or k[0] <= 0.0:
                raise OffShell(f"momentum label {k} is off shell")
            k.setflags(write=False)
            moms.append(k)
        object.__setattr__(self, "momenta", (moms[0], moms[1]))


def momentum_spin_product(
    mom_vector: np.ndarray, rho_spin: DensityMatrix, momenta
) -> TwoParticleState:
    """Product of a pure momentum state (4 amplitudes over the label basis
    |k_a, k_b>) with an arbitrary two-spin density matrix."""
    v = np.asarray(mom_vector, dtype=complex).reshape(4)
    v = v / np.linalg.norm(v)
    rho = kron(np.outer(v, v.conj()), rho_spin.matrix)
    return TwoParticleState(tuple(momenta), DensityMatrix(rho, (2, 2, 3, 3)))


def build_rho1(x: float, energy: float = 1.0) -> TwoParticleState:
    """Symmetrised momentum pair carrying the bound-entangled spin family:
    (|k1,k2> + |k2,k1>)/sqrt(2) ⊗ rho_b(x)."""
    k1 = four_momentum(energy, +1)
    k2 = four_momentum(energy, -1)
    psi_mom = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)
    return momentum_spin_product(psi_mom, rho_b(x), (k1, k2))


def build_rho0(
    p: float, x: float, energy: float = 1.0, interpretation: str = "bell-mixture"
) -> TwoParticleState:
    """Momenta-vs-spins separable activation mixture
    p rho_1(x) + (1-p) |k1,k2><k1,k2| ⊗ sigma, where sigma is the activation
    spin state under the chosen reading (see states.activation_spin_state;
    only the default "bell-mixture" reproduces the published run)."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"mixing weight p = {p} outside [0, 1]")
    s1 = build_rho1(x, energy)
    sigma = activation_spin_state(interpretation)
    e01 = np.array([0.0, 1.0, 0.0, 0.0])  # |k1, k2>
    mat2 = kron(np.outer(e01, e01), sigma.matrix)
    mat = p * s1.rho.matrix + (1.0 - p) * mat2
    return TwoParticleState(s1.momenta, DensityMatrix(mat, (2, 2, 3, 3)))


def boost_operator(momenta, b: BoostParams) -> np.ndarray:
    """36x36 unitary representing a boost on both particles: block diagonal
    over the momentum slots, acting as D(R(Lambda, k_m)) ⊗ D(R(Lambda, k_n))
    on the spins."""
    d = [spin1_rep(wigner_rotation(b, k)) for k in momenta]
    u = np.zeros((36, 36), dtype=complex)
    for m in range(2):
        pm = np.zeros((2, 2))
        pm[m, m] = 1.0
        for n in range(2):
            pn = np.zeros((2, 2))
            pn[n, n] = 1.0
            u += multi_kron(pm, pn, d[m], d[n])
    return u


def boost_two_particle(state: TwoParticleState, b: BoostParams) -> TwoParticleState:
    """Boost a two-particle state; momentum labels move to Lambda k and the
    density matrix is conjugated by the unitary of `boost_operator`."""
    u = boost_operator(state.momenta, b)
    lam = boost_matrix(b)
    new_moms = tuple(lam @ k for k in state.momenta)
    mat = u @ state.rho.matrix @ u.conj().T
    return TwoParticleState(new_moms, DensityMatrix(mat, (2, 2, 3, 3)))


def spin_marginal(state: TwoParticleState) -> DensityMatrix:
    """Reduced two-spin state (momenta traced out, renormalised)."""
    return partial_trace(state.rho, keep=(2, 3))


def boosted_spin_marginal(
    x: float,
    rapidity: float,
    energy: float = 1.0,
    direction=(0.0, 0.0, 1.0),
) -> DensityMatrix:
    """Spin marginal of the boosted bound-entangled family: build rho_1(x),
    boost it with the given rapidity and direction, trace out the momenta.
    rapidity 0 returns the unboosted marginal rho_b(x)."""
    state = build_rho1(x, energy)
    if rapidity != 0.0:
        state = boost_two_particle(state, BoostParams(direction, float(rapidity)))
    return spin_marginal(state)
