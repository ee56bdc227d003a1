"""Two-qutrit state constructions.

Conventions, fixed once for the whole package:

* Weyl operators  W_{k,l} = sum_j omega^{jk} |j><(j+l) mod 3|,
  omega = exp(2 pi i / 3).
* Bell basis      |Omega_{k,l}> = (W_{k,l} ⊗ I_3) |Omega_{0,0}>, with
  |Omega_{0,0}> = (|00> + |11> + |22>) / sqrt(3).
* Magic-simplex states are convex mixtures of the nine Bell projectors;
  their 3x3 coefficient matrix is indexed [k, l].
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidCoefficients, OutOfRange
from .linalg import DensityMatrix, kron

OMEGA = np.exp(2j * np.pi / 3)

# Mixing amplitudes of the spin state used by the activation example,
# indexed like the simplex coefficients.  They sum to one but their squares
# do not (sum of squares 74/324), hence the interpretations below.
ACTIVATION_AMPLITUDES = np.array(
    [
        [0.0, 2.0 / 9.0, 2.0 / 9.0],
        [0.0, 2.0 / 9.0, 1.0 / 18.0],
        [5.0 / 18.0, 0.0, 0.0],
    ]
)

PHI_INTERPRETATIONS = ("bell-mixture", "sqrt-amplitudes", "literal-renormalized")


def weyl(k: int, l: int) -> np.ndarray:
    """Weyl operator W_{k,l}; indices are reduced mod 3."""
    k = int(k) % 3
    l = int(l) % 3
    w = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        w[j, (j + l) % 3] = OMEGA ** (j * k)
    return w


def bell_state(k: int, l: int) -> np.ndarray:
    """Bell vector |Omega_{k,l}> as a 9-component array."""
    omega00 = np.eye(3, dtype=complex).reshape(9) / np.sqrt(3.0)
    return kron(weyl(k, l), np.eye(3)) @ omega00


def bell_projector(k: int, l: int) -> np.ndarray:
    v = bell_state(k, l)
    return np.outer(v, v.conj())


_BELL_PROJECTORS = None


def bell_projectors() -> np.ndarray:
    """All nine Bell projectors as an array of shape (3, 3, 9, 9)."""
    global _BELL_PROJECTORS
    if _BELL_PROJECTORS is None:
        p = np.empty((3, 3, 9, 9), dtype=complex)
        for k in range(3):
            for l in range(3):
                p[k, l] = bell_projector(k, l)
        p.setflags(write=False)
        _BELL_PROJECTORS = p
    return _BELL_PROJECTORS


def simplex_state(c) -> DensityMatrix:
    """Mixture sum_{k,l} c[k,l] P_{k,l} of the nine Bell projectors.

    c must be a real 3x3 array with non-negative entries summing to one.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (3, 3):
        raise InvalidCoefficients(f"coefficient matrix must be 3x3, got {c.shape}")
    if c.min() < -1e-12:
        raise InvalidCoefficients(f"negative coefficient {c.min():.3e}")
    if abs(c.sum() - 1.0) > 1e-12:
        raise InvalidCoefficients(f"coefficients sum to {c.sum()!r}, not 1")
    mat = np.einsum("kl,klab->ab", np.clip(c, 0.0, None), bell_projectors())
    return DensityMatrix(mat, (3, 3))


def rho_b_coefficients(x: float) -> np.ndarray:
    """Simplex coefficients of the one-parameter family rho_b(x)."""
    x = float(x)
    if not 0.0 <= x <= 1.0 / 3.0 + 1e-15:
        raise OutOfRange(f"x = {x} outside [0, 1/3]")
    y = 1.0 / 3.0 - x
    return np.array([[2 * x, 0.0, y], [0.0, x, y], [0.0, 0.0, y]])


def rho_b(x: float) -> DensityMatrix:
    """One-parameter magic-simplex family: PPT for x <= 2/15, entangled for
    every x except x = 0."""
    return simplex_state(rho_b_coefficients(x))


def phi_spin(interpretation: str = "sqrt-amplitudes") -> np.ndarray:
    """Unit spin vector built from the activation amplitude table, as a
    9-component array.  Only the two pure-state readings make sense here;
    use activation_spin_state for the full set of interpretations.

    * ``"sqrt-amplitudes"``: coefficients sqrt(a_{k,l}) on the Bell basis
      (unit norm by construction);
    * ``"literal-renormalized"``: coefficients a_{k,l}, renormalised.
    """
    if interpretation not in ("sqrt-amplitudes", "literal-renormalized"):
        raise ValueError(
            f"phi_spin needs a pure-state reading, got {interpretation!r}"
        )
    a = ACTIVATION_AMPLITUDES
    coef = np.sqrt(a) if interpretation == "sqrt-amplitudes" else a.copy()
    vec = np.zeros(9, dtype=complex)
    for k in range(3):
        for l in range(3):
            if coef[k, l] != 0.0:
                vec += coef[k, l] * bell_state(k, l)
    return vec / np.linalg.norm(vec)


def activation_spin_state(interpretation: str = "bell-mixture") -> DensityMatrix:
    """Spin factor of the activation example under a documented reading of
    its amplitude table.

    The table rows sum to one like probabilities but decorate a ket in the
    source construction, so three readings are supported:

    * ``"bell-mixture"``: Bell-diagonal mixture sum a_{k,l} P_{k,l}.  This
      is the only reading whose numbers match the published activation run
      (PPT before the boost, realignment value 0.183, NPT after a boost
      with rapidity 0.95), and therefore the default everywhere.
    * ``"sqrt-amplitudes"`` / ``"literal-renormalized"``: the projector onto
      the corresponding phi_spin ket.  Both give a strongly NPT state, kept
      for comparison.
    """
    if interpretation not in PHI_INTERPRETATIONS:
        raise ValueError(
            f"unknown interpretation {interpretation!r}; choose from {PHI_INTERPRETATIONS}"
        )
    if interpretation == "bell-mixture":
        return simplex_state(ACTIVATION_AMPLITUDES)
    v = phi_spin(interpretation)
    return DensityMatrix(np.outer(v, v.conj()), (3, 3))


def mub_bases() -> np.ndarray:
    """Four mutually unbiased qutrit bases, shape (4, 3, 3); bases[b][i] is
    the i-th unit vector of basis b.

    Basis 0 is computational.  Basis 1+s (s = 0, 1, 2) has vectors
    v_i[j] = omega^(s j^2 + i j) / sqrt(3); s = 0 is the Fourier basis and
    s = 1, 2 are its two quadratically phased companions.
    """
    bases = np.empty((4, 3, 3), dtype=complex)
    bases[0] = np.eye(3)
    j = np.arange(3)
    for s in range(3):
        for i in range(3):
            bases[1 + s, i] = OMEGA ** ((s * j * j + i * j) % 3) / np.sqrt(3.0)
    return bases
