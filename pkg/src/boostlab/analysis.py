"""Entanglement detection: PPT spectra, the realignment criterion, the
MUB witness with its convention calibration, seesaw separable windows,
and the classification pipeline.

Detection thresholds: a bipartite state counts as PPT when the smallest
partial-transpose eigenvalue is >= -1e-10 and as NPT when it is < -1e-8;
the region in between is flagged as borderline and never classified hard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BadSubsystem, NoConvergence, UnknownConvention
from .linalg import (
    DensityMatrix,
    hermitian_eigenvalues,
    kron,
    partial_transpose,
    realign,
    singular_values,
    trace_out,
)
from .relativity import (
    BoostParams,
    boost_operator,
    boost_two_particle,
    build_rho1,
    spin_marginal,
)
from .states import mub_bases

PPT_TOL = -1e-10
NPT_TOL = -1e-8

NPT_FREE = "NPT_FREE"
PPT_ENTANGLED = "PPT_ENTANGLED"
SEPARABLE = "SEPARABLE"
PPT_UNDECIDED = "PPT_UNDECIDED"

# Separable upper bound of the calibrated spin witness; printed analytically
# in the source material and confirmed by the seesaw window here.
WITNESS_UPPER_SEPARABLE = 2.0


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose over the second slot."""
    if len(rho.dims) != 2:
        raise BadSubsystem(f"need a bipartite state, got dims {rho.dims}")
    return float(hermitian_eigenvalues(partial_transpose(rho, 1)).min())


def rlgmt(rho: DensityMatrix) -> float:
    """log2 of the trace norm of the realigned state; > 0 certifies
    entanglement, <= 0 for every separable state."""
    return float(np.log2(singular_values(realign(rho)).sum()))


def realignment_curve(x_grid, boost: BoostParams, energy: float = 1.0) -> np.ndarray:
    """RLGMT of the boosted spin marginal of rho_1(x) over a grid of x;
    returns an array of (x, value) rows.  rapidity 0 reproduces the
    unboosted curve."""
    out = np.empty((len(x_grid), 2))
    for i, x in enumerate(x_grid):
        state = boost_two_particle(build_rho1(float(x), energy), boost)
        out[i] = (float(x), rlgmt(spin_marginal(state)))
    return out


# ---------------------------------------------------------------------------
# MUB witness


def witness_conventions() -> list[str]:
    """Documented convention ids, in calibration order.

    ``shifted=<b>;step=<s>;conj=<slot>``: basis b contributes the index-shifted
    projector sum (vector i paired with vector i+s), the other three bases the
    diagonal sums, and the second (or first) factor of every pair is complex
    conjugated.
    """
    return [
        f"shifted={b};step={s};conj={c}"
        for b in range(4)
        for s in (1, 2)
        for c in ("second", "first")
    ]


def mub_witness_spin(convention: str) -> np.ndarray:
    """Sum of the twelve MUB product projectors (trace 12) in the given
    convention; Hermitian on the 9-dimensional two-spin space."""
    try:
        parts = dict(p.split("=") for p in convention.split(";"))
        shifted = int(parts["shifted"])
        step = int(parts["step"])
        conj = parts["conj"]
        assert shifted in range(4) and step in (1, 2) and conj in ("second", "first")
    except Exception as exc:
        raise UnknownConvention(f"bad witness convention {convention!r}") from exc
    bases = mub_bases()
    pairs = [(bases[shifted][i], bases[shifted][(i + step) % 3]) for i in range(3)]
    for b in range(4):
        if b == shifted:
            continue
        pairs.extend((bases[b][i], bases[b][i]) for i in range(3))
    w = np.zeros((9, 9), dtype=complex)
    for u, v in pairs:
        t = kron(u, v.conj()) if conj == "second" else kron(u.conj(), v)
        w += np.outer(t, t.conj())
    return w


def _rho_b_pairing_fit(w: np.ndarray) -> tuple[float, float]:
    from .states import rho_b

    xs = np.linspace(0.0, 1.0 / 3.0, 9)
    vals = [float(np.trace(w @ rho_b(x).matrix).real) for x in xs]
    slope, intercept = np.polyfit(xs, vals, 1)
    resid = max(abs(v - (slope * x + intercept)) for v, x in zip(vals, xs))
    if resid > 1e-9:
        # pairing with the one-parameter family is exactly affine for every
        # convention; anything else means the construction is broken
        raise NoConvergence(f"witness pairing not affine (residual {resid:.2e})")
    return float(slope), float(intercept)


@lru_cache(maxsize=1)
def calibrate_witness() -> tuple[str, np.ndarray]:
    """Pick the first documented convention whose pairing with the
    one-parameter family fits 2 + x (equivalently 1/2 + x/4 on the total
    space) to 1e-3, and return (convention_id, witness)."""
    for conv in witness_conventions():
        w = mub_witness_spin(conv)
        slope, intercept = _rho_b_pairing_fit(w)
        if abs(slope - 1.0) <= 4e-3 and abs(intercept - 2.0) <= 4e-3:
            w.setflags(write=False)
            return conv, w
    raise NoConvergence("no documented convention reproduces the 2 + x pairing")


def witness_total(w_spin: np.ndarray) -> np.ndarray:
    """Witness on the full 36-dimensional space: unit-trace identity on the
    momentum factor tensored with the spin witness, so the total pairing with
    any momentum ⊗ spin product state equals tr(w_spin rho_spin) / 4 and the
    momentum partial trace returns w_spin itself."""
    return kron(np.eye(4) / 4.0, w_spin)


def boost_witness(w_total: np.ndarray, b: BoostParams, momenta=None) -> np.ndarray:
    """Conjugate the total witness by the two-particle boost representation;
    momenta default to the standard opposite pair at unit kinetic energy."""
    if momenta is None:
        from .relativity import four_momentum

        momenta = (four_momentum(1.0, +1), four_momentum(1.0, -1))
    u = boost_operator(momenta, b)
    return u @ w_total @ u.conj().T


def spin_traced_witness(w_total: np.ndarray) -> np.ndarray:
    """Momentum partial trace of a total-space witness (operator trace,
    no renormalisation)."""
    return trace_out(w_total, (2, 2, 3, 3), keep=(2, 3))


def witness_expectation(w: np.ndarray, rho) -> float:
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.trace(np.asarray(w) @ mat).real)


def affine_fit(xs, ys) -> tuple[float, float]:
    """Least-squares (slope, intercept) of y over x."""
    slope, intercept = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    return float(slope), float(intercept)


# ---------------------------------------------------------------------------
# Seesaw separable window


def _seesaw_once(w4, a, b, pick, max_iter, conv_tol):
    val = None
    for _ in range(max_iter):
        ma = np.einsum("a,iajb,b->ij", b.conj(), w4, b)
        ma = (ma + ma.conj().T) / 2.0
        a = np.linalg.eigh(ma)[1][:, pick]
        mb = np.einsum("i,iajb,j->ab", a.conj(), w4, a)
        mb = (mb + mb.conj().T) / 2.0
        b = np.linalg.eigh(mb)[1][:, pick]
        new = float(np.einsum("i,a,iajb,j,b", a.conj(), b.conj(), w4, a, b).real)
        if val is not None and abs(new - val) < conv_tol:
            return new, True
        val = new
    return val, False


def separable_bounds(
    w: np.ndarray,
    dims: tuple[int, int] = (3, 3),
    restarts: int = 64,
    seed: int = 0,
    max_iter: int = 10000,
    conv_tol: float = 1e-12,
) -> tuple[float, float]:
    """Extremal expectation values of a Hermitian operator over product
    states |a>|b>, by alternating extremal-eigenvector updates.

    Each restart runs both the minimising and the maximising seesaw from
    the same random start; the window over converged restarts is returned.
    Restart seeds are spawned from `seed`, so growing `restarts` only ever
    widens the window.
    """
    da, db = dims
    w = np.asarray(w, dtype=complex)
    if w.shape != (da * db, da * db):
        raise BadSubsystem(f"operator shape {w.shape} does not match dims {dims}")
    w4 = w.reshape(da, db, da, db)
    children = np.random.SeedSequence(seed).spawn(restarts)
    lo, hi = np.inf, -np.inf
    converged = 0
    for child in children:
        rng = np.random.default_rng(child)
        a0 = rng.normal(size=da) + 1j * rng.normal(size=da)
        b0 = rng.normal(size=db) + 1j * rng.normal(size=db)
        a0 /= np.linalg.norm(a0)
        b0 /= np.linalg.norm(b0)
        for pick, side in ((0, "min"), (-1, "max")):
            val, ok = _seesaw_once(w4, a0.copy(), b0.copy(), pick, max_iter, conv_tol)
            converged += ok
            if side == "min":
                lo = min(lo, val)
            else:
                hi = max(hi, val)
    if converged == 0:
        raise NoConvergence("no seesaw restart converged within the budget")
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class SolverBudget:
    """Budget handed to the separability solver during classification;
    restarts = 0 disables the solver entirely."""

    k: int = 10
    restarts: int = 16
    tol: float = 1e-6
    max_steps: int = 600
    seed: int = 0


@dataclass
class ClassificationResult:
    label: str
    min_pt_eigenvalue: float
    rlgmt: float
    witness_value: float
    witness_upper: float
    borderline: bool = False
    certificate: object = None

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "rlgmt": self.rlgmt,
            "witness_value": self.witness_value,
            "witness_upper": self.witness_upper,
            "borderline": self.borderline,
        }
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        return d


def classify(rho: DensityMatrix, budget: SolverBudget | None = None) -> ClassificationResult:
    """Entanglement class of a two-qutrit state.

    NPT_FREE on a negative partial transpose; PPT_ENTANGLED when PPT plus
    positive realignment or a witness value above its separable bound;
    SEPARABLE only with an explicit solver certificate; PPT_UNDECIDED
    otherwise (always when the partial transpose sits in the borderline
    band between the PPT and NPT thresholds).
    """
    mp = ppt_min_eigenvalue(rho)
    r = rlgmt(rho)
    _, w = calibrate_witness()
    wval = witness_expectation(w, rho)
    res = ClassificationResult(
        label=PPT_UNDECIDED,
        min_pt_eigenvalue=mp,
        rlgmt=r,
        witness_value=wval,
        witness_upper=WITNESS_UPPER_SEPARABLE,
    )
    if mp < NPT_TOL:
        res.label = NPT_FREE
        return res
    if mp < PPT_TOL:
        res.borderline = True
        return res
    if r > 1e-12 or wval > WITNESS_UPPER_SEPARABLE + 1e-9:
        res.label = PPT_ENTANGLED
        return res
    if budget is not None and budget.restarts > 0:
        from .separability import certify_separable

        cert = certify_separable(
            rho,
            k=budget.k,
            restarts=budget.restarts,
            tol=budget.tol,
            max_steps=budget.max_steps,
            seed=budget.seed,
        )
        if cert.success:
            res.label = SEPARABLE
            res.certificate = cert.ensemble
    return res


# ---------------------------------------------------------------------------
# Reporting


@dataclass
class WitnessReport:
    """Witness expectation against its separable window, as serialised by
    the CLI: value, (lower, upper), convention, boost parameters, and the
    tolerances the numbers were produced with."""

    value: float
    lower: float
    upper: float
    convention_id: str
    direction: tuple[float, float, float]
    rapidity: float
    bound_method: str = "seesaw"
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "convention_id": self.convention_id,
            "boost": {"direction": list(self.direction), "rapidity": self.rapidity},
            "bound_method": self.bound_method,
            "tolerances": dict(self.tolerances),
        }
