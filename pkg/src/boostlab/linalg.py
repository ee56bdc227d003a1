"""Dense complex linear algebra for small multipartite operators.

Operators are plain numpy complex arrays in row-major order; multipartite
structure is carried separately as a tuple of subsystem dimensions whose
slot order fixes the tensor-index layout used by the reshape tricks below.
Decompositions delegate to LAPACK through numpy.linalg, which is
deterministic and more than accurate enough at these sizes (<= 36).
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .errors import BadSubsystem, DimensionMismatch, NotHermitian

# Hermiticity tolerance for states the package builds itself vs. matrices
# handed in from outside (files, user code).
HERM_TOL_CONSTRUCTED = 1e-12
HERM_TOL_INPUT = 1e-10
PSD_TOL = 1e-10


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product; (a ⊗ b)[i q + j, k r + l] = a[i,k] b[j,l]."""
    return np.kron(np.asarray(a), np.asarray(b))


def multi_kron(*factors) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f))
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one positive semidefinite operator with subsystem dimensions.

    Hermiticity is enforced to ``herm_tol`` (default 1e-12, appropriate for
    states constructed by this package; pass ``HERM_TOL_INPUT`` for matrices
    read from files or user code), the trace to 1e-12, and the smallest
    eigenvalue must not drop below -1e-10.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    herm_tol: InitVar[float] = HERM_TOL_CONSTRUCTED

    def __post_init__(self, herm_tol: float):
        mat = np.array(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {mat.shape}")
        if int(np.prod(dims)) != mat.shape[0]:
            raise BadSubsystem(f"dims {dims} do not factor dimension {mat.shape[0]}")
        if not np.isfinite(mat).all():
            raise ValueError("density matrix contains non-finite entries")
        herm_dev = float(np.abs(mat - mat.conj().T).max())
        if herm_dev > herm_tol:
            raise NotHermitian(f"max |rho - rho^dag| = {herm_dev:.3e} exceeds {herm_tol:.1e}")
        tr = complex(mat.trace())
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace {tr} deviates from one by more than 1e-12")
        lam_min = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min())
        if lam_min < -PSD_TOL:
            raise ValueError(f"smallest eigenvalue {lam_min:.3e} below -{PSD_TOL:.1e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hermitian_eigenvalues(h: np.ndarray, tol: float = HERM_TOL_INPUT) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    h = np.asarray(h, dtype=complex)
    dev = float(np.abs(h - h.conj().T).max())
    if dev > tol:
        raise NotHermitian(f"max |h - h^dag| = {dev:.3e} exceeds {tol:.1e}")
    return np.linalg.eigvalsh(h)


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values in descending order (non-negative by construction)."""
    return np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)


def _check_slot(dims, subsystem: int):
    if not 0 <= int(subsystem) < len(dims):
        raise BadSubsystem(f"subsystem {subsystem} out of range for dims {tuple(dims)}")


def transpose_subsystem(mat: np.ndarray, dims, subsystem: int) -> np.ndarray:
    """Partial transpose of a square matrix over one tensor slot."""
    dims = tuple(int(d) for d in dims)
    _check_slot(dims, subsystem)
    n = len(dims)
    t = np.asarray(mat).reshape(dims + dims)
    t = np.swapaxes(t, subsystem, n + subsystem)
    return t.reshape(mat.shape)


def partial_transpose(rho: DensityMatrix, subsystem: int) -> np.ndarray:
    """Transpose one subsystem: for a bipartite state and subsystem=1,
    [rho^Gamma]_{ia,jb} = rho_{ib,ja}. Hermitian but possibly non-positive."""
    return transpose_subsystem(rho.matrix, rho.dims, subsystem)


def trace_out(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace of a square matrix keeping the listed slots, without
    renormalisation (also usable for observables, not just states)."""
    dims = tuple(int(d) for d in dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise BadSubsystem("must keep at least one subsystem")
    for k in keep:
        _check_slot(dims, k)
    n = len(dims)
    row = list(range(n))
    col = [n + k if k in keep else k for k in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    t = np.einsum(np.asarray(mat).reshape(dims + dims), row + col, out)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the kept slots (original slot order), renormalised."""
    red = trace_out(rho.matrix, rho.dims, keep)
    red = red / red.trace()
    kept_dims = tuple(rho.dims[k] for k in sorted(set(int(k) for k in keep)))
    return DensityMatrix(red, kept_dims)


def realign(rho: DensityMatrix) -> np.ndarray:
    """Realignment map R[(i,j),(a,b)] = rho_{ia,jb} of a bipartite state;
    returns a (dA^2, dB^2) matrix."""
    if len(rho.dims) != 2:
        raise BadSubsystem(f"realignment needs a bipartite state, got dims {rho.dims}")
    da, db = rho.dims
    return rho.matrix.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def hs_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) distance sqrt(tr[(a-b)^dag (a-b)])."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def purity(rho: DensityMatrix) -> float:
    return float(np.trace(rho.matrix @ rho.matrix).real)
