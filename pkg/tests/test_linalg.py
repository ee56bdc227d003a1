"""Tests for the dense linear-algebra layer."""

import numpy as np
import pytest

from boostlab.errors import BadSubsystem, DimensionMismatch, NotHermitian
from boostlab.linalg import (
    DensityMatrix,
    dagger,
    hermitian_eigenvalues,
    hs_distance,
    kron,
    multi_kron,
    partial_trace,
    partial_transpose,
    purity,
    realign,
    singular_values,
    trace_out,
    transpose_subsystem,
)


def random_density(rng, dims):
    """Full-rank random state from a normalised Wishart draw."""
    n = int(np.prod(dims))
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ dagger(g)
    return DensityMatrix(m / np.trace(m).real, dims)


def haar_unitary(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    # fix the column phases so the distribution is Haar, not QR-skewed
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_density_matrix_validation():
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.zeros((3, 4)), (3, 4))
    with pytest.raises(BadSubsystem):
        DensityMatrix(np.eye(6) / 6, (2, 2))
    skew = np.eye(4, dtype=complex) / 4
    skew[0, 1] = 0.3
    with pytest.raises(NotHermitian):
        DensityMatrix(skew, (2, 2))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 2, (2, 2))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5, 0.0, 0.0]), (2, 2))
    nan = np.eye(4, dtype=complex) / 4
    nan[2, 2] = np.nan
    with pytest.raises(ValueError):
        DensityMatrix(nan, (2, 2))


def test_density_matrix_is_frozen():
    rho = DensityMatrix(np.eye(4) / 4, (2, 2))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 9.0


def test_herm_tol_input_accepts_file_grade_noise():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    m = g @ dagger(g)
    m = m / np.trace(m).real
    noise = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    np.fill_diagonal(noise, 0.0)  # keep the trace exact, perturb hermiticity only
    m = m + 1e-11 * noise
    with pytest.raises(NotHermitian):
        DensityMatrix(m, (3, 3))
    DensityMatrix((m + dagger(m)) / 2, (3, 3), herm_tol=1e-10)


def test_eigenvalues_real_and_sum_to_trace():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = rng.integers(2, 13)
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = g + dagger(g)
        ev = hermitian_eigenvalues(h)
        assert ev.dtype.kind == "f"
        assert abs(ev.sum() - np.trace(h).real) <= 1e-10 * max(1.0, abs(np.trace(h).real))


def test_hermitian_eigenvalues_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_singular_values_match_gram_route():
    # independent route: sqrt of the eigenvalues of m^dag m
    rng = np.random.default_rng(5)
    for _ in range(100):
        n, m = rng.integers(2, 10, size=2)
        mat = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
        sv = singular_values(mat)
        gram = np.sqrt(np.maximum(np.linalg.eigvalsh(dagger(mat) @ mat), 0.0))[::-1]
        assert np.all(sv[:-1] >= sv[1:] - 1e-14)
        assert np.abs(sv - gram[: len(sv)]).max() <= 1e-10


def test_partial_transpose_is_an_involution():
    rng = np.random.default_rng(21)
    for dims in [(2, 3), (3, 3), (3, 4), (2, 2, 3)]:
        for _ in range(25):
            rho = random_density(rng, dims)
            sub = int(rng.integers(0, len(dims)))
            once = transpose_subsystem(rho.matrix, dims, sub)
            twice = transpose_subsystem(once, dims, sub)
            assert np.array_equal(twice, rho.matrix)


def test_partial_transpose_known_two_qubit_case():
    # |phi+><phi+| on 2x2: partially transposed spectrum is {1/2, 1/2, 1/2, -1/2}
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = DensityMatrix(np.outer(v, v), (2, 2))
    ev = hermitian_eigenvalues(partial_transpose(rho, 1))
    assert np.abs(ev - np.array([-0.5, 0.5, 0.5, 0.5])).max() <= 1e-12


def test_partial_transpose_slot_out_of_range():
    rho = DensityMatrix(np.eye(9) / 9, (3, 3))
    with pytest.raises(BadSubsystem):
        partial_transpose(rho, 2)


def test_product_conjugation_commutes_through_partial_transpose():
    # [(A x B) rho (C x D)]^{T_B} = (A x D^T) rho^{T_B} (C x B^T)
    rng = np.random.default_rng(33)
    worst = 0.0
    for _ in range(100):
        rho = random_density(rng, (3, 3)).matrix
        a, b, c, d = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(4))
        lhs = transpose_subsystem(kron(a, b) @ rho @ kron(c, d), (3, 3), 1)
        rhs = kron(a, d.T) @ transpose_subsystem(rho, (3, 3), 1) @ kron(c, b.T)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    assert worst <= 1e-10


def test_trace_out_keeps_slot_order_and_normalisation():
    rng = np.random.default_rng(7)
    a = random_density(rng, (3,)).matrix
    b = random_density(rng, (4,)).matrix
    prod = kron(a, b)
    assert np.abs(trace_out(prod, (3, 4), keep=(0,)) - a).max() <= 1e-12
    assert np.abs(trace_out(prod, (3, 4), keep=(1,)) - b).max() <= 1e-12
    # trace_out does not renormalise; partial_trace does
    half = 0.5 * prod
    red = trace_out(half, (3, 4), keep=(0,))
    assert abs(np.trace(red) - 0.5) <= 1e-12
    rho = DensityMatrix(prod, (3, 4))
    red2 = partial_trace(rho, keep=(1,))
    assert abs(np.trace(red2.matrix) - 1.0) <= 1e-12
    assert red2.dims == (4,)
    with pytest.raises(BadSubsystem):
        trace_out(prod, (3, 4), keep=())


def test_partial_trace_of_tripartite_product():
    rng = np.random.default_rng(19)
    parts = [random_density(rng, (d,)).matrix for d in (2, 3, 3)]
    rho = DensityMatrix(multi_kron(*parts), (2, 3, 3))
    red = partial_trace(rho, keep=(0, 2))
    assert np.abs(red.matrix - kron(parts[0], parts[2])).max() <= 1e-12


def test_realign_shape_and_flat_state():
    # the realigned maximally mixed 3x3 state is rank one with singular value 1/3
    rho = DensityMatrix(np.eye(9) / 9, (3, 3))
    r = realign(rho)
    assert r.shape == (9, 9)
    sv = singular_values(r)
    assert abs(sv[0] - 1.0 / 3.0) <= 1e-12
    assert sv[1:].max() <= 1e-12
    with pytest.raises(BadSubsystem):
        realign(DensityMatrix(np.eye(8) / 8, (2, 2, 2)))


def test_realign_singular_values_are_local_unitary_invariant():
    rng = np.random.default_rng(42)
    rho = random_density(rng, (3, 3))
    base = singular_values(realign(rho)).sum()
    for _ in range(100):
        u = kron(haar_unitary(rng, 3), haar_unitary(rng, 3))
        rot = DensityMatrix(u @ rho.matrix @ dagger(u), (3, 3))
        assert abs(singular_values(realign(rot)).sum() - base) <= 1e-10


def test_hs_distance_metric_properties():
    rng = np.random.default_rng(55)
    for _ in range(100):
        a, b, c = (rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)) for _ in range(3))
        assert hs_distance(a, a) == 0.0
        assert abs(hs_distance(a, b) - hs_distance(b, a)) <= 1e-12
        assert hs_distance(a, c) <= hs_distance(a, b) + hs_distance(b, c) + 1e-12
    with pytest.raises(DimensionMismatch):
        hs_distance(np.eye(2), np.eye(3))


def test_purity_range():
    rng = np.random.default_rng(8)
    pure = np.zeros((9, 9))
    pure[4, 4] = 1.0
    assert abs(purity(DensityMatrix(pure, (3, 3))) - 1.0) <= 1e-12
    assert abs(purity(DensityMatrix(np.eye(9) / 9, (3, 3))) - 1.0 / 9.0) <= 1e-12
    for _ in range(20):
        p = purity(random_density(rng, (3, 3)))
        assert 1.0 / 9.0 - 1e-12 <= p <= 1.0 + 1e-12
