"""Tests for the separable-decomposition solver and the stored ensemble."""

import json

import numpy as np
import pytest

from boostlab.errors import FixtureCorrupt, OutOfRange
from boostlab.linalg import DensityMatrix, hermitian_eigenvalues, hs_distance, partial_transpose
from boostlab.relativity import boosted_spin_marginal
from boostlab.separability import (
    SeparableEnsemble,
    _pack,
    _unpack,
    _value_and_grad,
    certify_separable,
    default_fixture_path,
    ensemble_state,
    load_appendix_ensemble,
    product_defect,
    verify_appendix_fixture,
)
from boostlab.states import bell_state, rho_b, simplex_state


def test_product_defect_endpoints():
    a = np.array([1.0, 2.0, -1.0])
    b = np.array([0.5, 1j, 0.0])
    assert product_defect(np.kron(a, b)) <= 1e-14
    # maximally entangled vector sits as far from the products as possible
    assert abs(product_defect(bell_state(0, 0)) - 1.0 / np.sqrt(3.0)) <= 1e-12


def test_ensemble_validation_and_roundtrip():
    rng = np.random.default_rng(9)
    w = rng.dirichlet(np.ones(4))
    v = rng.normal(size=(4, 9)) + 1j * rng.normal(size=(4, 9))
    ens = SeparableEnsemble(w, v, gap=1e-7, metadata={"k": 4})
    d = ens.to_dict()
    back = SeparableEnsemble.from_dict(d)
    assert np.abs(back.weights - ens.weights).max() == 0.0
    assert np.abs(back.vectors - ens.vectors).max() == 0.0
    assert back.gap == ens.gap
    with pytest.raises(OutOfRange):
        SeparableEnsemble(-w, v)
    with pytest.raises(OutOfRange):
        SeparableEnsemble(w, v[:, :6])
    with pytest.raises(FixtureCorrupt):
        SeparableEnsemble.from_dict({"probabilities": [1.0]})


def test_ensemble_state_normalises():
    # unnormalised weights and vectors still give a unit-trace state
    w = np.array([2.0, 6.0])
    v = np.zeros((2, 9), dtype=complex)
    v[0, 0] = 5.0
    v[1, 4] = 0.1
    rho = ensemble_state(SeparableEnsemble(w, v))
    assert abs(np.trace(rho.matrix).real - 1.0) <= 1e-12
    assert abs(rho.matrix[0, 0].real - 0.25) <= 1e-12
    assert abs(rho.matrix[4, 4].real - 0.75) <= 1e-12


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(17)
    target = rho_b(0.1).matrix
    k = 4
    A = 0.5 * (rng.normal(size=(k, 3)) + 1j * rng.normal(size=(k, 3)))
    B = 0.5 * (rng.normal(size=(k, 3)) + 1j * rng.normal(size=(k, 3)))
    _, ga, gb = _value_and_grad(target, A, B)
    h = 1e-6

    def value(Ax, Bx):
        return _value_and_grad(target, Ax, Bx)[0]

    def central(base, other, idx, step, first):
        lo, hi = base.copy(), base.copy()
        lo[idx] -= step * h
        hi[idx] += step * h
        if first:
            return (value(hi, other) - value(lo, other)) / (2.0 * h)
        return (value(other, hi) - value(other, lo)) / (2.0 * h)

    worst = 0.0
    for idx in [(0, 0), (1, 2), (3, 1)]:
        worst = max(worst, abs(central(A, B, idx, 1.0, True) - 2.0 * ga[idx].real))
        worst = max(worst, abs(central(A, B, idx, 1j, True) - 2.0 * ga[idx].imag))
        worst = max(worst, abs(central(B, A, idx, 1.0, False) - 2.0 * gb[idx].real))
        worst = max(worst, abs(central(B, A, idx, 1j, False) - 2.0 * gb[idx].imag))
    assert worst <= 1e-5


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    B = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    A2, B2 = _unpack(_pack(A, B), 5)
    assert np.abs(A2 - A).max() == 0.0
    assert np.abs(B2 - B).max() == 0.0


def test_certify_flat_state():
    res = certify_separable(DensityMatrix(np.eye(9) / 9, (3, 3)), k=9, tol=1e-8)
    assert res.success
    assert res.gap < 1e-8


def test_certify_boosted_marginal_default_budget():
    rho = boosted_spin_marginal(1.0 / 15.0, 0.8)
    res = certify_separable(rho)
    assert res.success
    assert res.gap < 1e-6
    # every stored vector is an exact product up to solver noise
    assert max(product_defect(v) for v in res.ensemble.vectors) <= 1e-6
    # the decomposition is PPT by construction
    rebuilt = ensemble_state(res.ensemble)
    assert hermitian_eigenvalues(partial_transpose(rebuilt, 1)).min() >= -1e-10
    assert abs(res.ensemble.weights.sum() - 1.0) <= 1e-9


def test_certify_gap_matches_reconstruction():
    rho = boosted_spin_marginal(1.0 / 15.0, 0.8)
    res = certify_separable(rho, restarts=2)
    rebuilt = ensemble_state(res.ensemble)
    assert abs(hs_distance(rebuilt.matrix, rho.matrix) - res.gap) <= 1e-12


def test_certify_is_deterministic():
    rho = boosted_spin_marginal(1.0 / 10.0, 0.8)
    r1 = certify_separable(rho, restarts=3)
    r2 = certify_separable(rho, restarts=3)
    assert r1.gap == r2.gap
    assert r1.history == r2.history
    assert np.abs(r1.ensemble.vectors - r2.ensemble.vectors).max() == 0.0


def test_certify_history_is_monotone():
    res = certify_separable(rho_b(0.2), restarts=5, max_steps=150)
    assert not res.success
    assert len(res.history) == 5
    assert all(b <= a + 1e-15 for a, b in zip(res.history, res.history[1:]))


def test_certify_rejects_bad_arguments():
    rho = DensityMatrix(np.eye(9) / 9, (3, 3))
    with pytest.raises(OutOfRange):
        certify_separable(DensityMatrix(np.eye(8) / 8, (2, 4)))
    with pytest.raises(OutOfRange):
        certify_separable(rho, k=0)
    with pytest.raises(OutOfRange):
        certify_separable(rho, restarts=0)


def test_certify_never_accepts_npt_states():
    # soundness: a state with negative partial transpose has no separable
    # decomposition, so success would be a solver bug regardless of budget
    rng = np.random.default_rng(29)
    done = 0
    while done < 50:
        c = rng.dirichlet(np.ones(9)).reshape(3, 3)
        rho = simplex_state(c)
        if hermitian_eigenvalues(partial_transpose(rho, 1)).min() >= -1e-4:
            continue
        done += 1
        res = certify_separable(rho, restarts=2, max_steps=200)
        assert not res.success
        rebuilt = ensemble_state(res.ensemble)
        assert abs(hs_distance(rebuilt.matrix, rho.matrix) - res.gap) <= 1e-12


def test_certification_result_to_dict():
    res = certify_separable(DensityMatrix(np.eye(9) / 9, (3, 3)), k=9, tol=1e-8)
    d = res.to_dict()
    assert d["success"] is True
    assert d["k"] == 9
    assert isinstance(d["history"], list)
    assert "probabilities" in d["ensemble"]


def test_fixture_loads_and_verifies():
    ens = load_appendix_ensemble()
    assert len(ens.weights) == 10
    assert ens.vectors.shape == (10, 9)
    report = verify_appendix_fixture()
    assert report["passed"]
    assert report["gap"] <= 1e-5
    assert abs(report["prob_sum"] - 0.9999998) <= 1e-7
    assert report["max_product_defect"] <= 1e-4
    assert report["n_terms"] == 10
    assert set(report["checks"]) == {
        "gap_below_1e-5",
        "prob_sum_matches",
        "products_within_1e-4",
    }


def test_fixture_weights_kept_verbatim():
    # the stored digits are not silently renormalised
    ens = load_appendix_ensemble()
    assert ens.weights.sum() != 1.0
    assert abs(ens.weights.sum() - 0.9999998) <= 1e-12


def test_fixture_corrupt_paths(tmp_path):
    with pytest.raises(FixtureCorrupt):
        load_appendix_ensemble(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    with pytest.raises(FixtureCorrupt):
        load_appendix_ensemble(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"probabilities": [1.0], "vectors": []}))
    with pytest.raises(FixtureCorrupt):
        load_appendix_ensemble(wrong)
    # a corrupted digit must push the verification gap over its threshold
    payload = json.loads(default_fixture_path().read_text())
    payload["probabilities"][0] += 0.05
    tweaked = tmp_path / "tweaked.json"
    tweaked.write_text(json.dumps(payload))
    report = verify_appendix_fixture(tweaked)
    assert not report["passed"]
