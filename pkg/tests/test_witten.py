import numpy as np
import pytest

from spinlab.witten import (
    SpectralCollision,
    TameTupleModel,
    check_tame,
    eigenpacket,
    eigenvalue_to_distance,
    grassmann_distance,
    grassmann_distance_bounds,
    load_model,
    localization_bounds,
    phi_coherence,
    phi_map,
    search_T0,
    standard_models,
    verify_localization,
)

MODELS = standard_models()


def linear(**kw):
    base = dict(name="lin", interval=(-6.0, 6.0), N=1200, coefficients=(0.0, 1.0), F=((-0.5, 0.5),), lam_bar=1.0, T=5.0)
    base.update(kw)
    return TameTupleModel(**base)


# bounds


def test_bounds_example():
    A, B = localization_bounds({"lam_bar": 1.0, "anticommutator": 1.0, "h_inverse": 1.0}, 10.0)
    assert A**2 == pytest.approx(0.21)
    assert A == pytest.approx(0.4583, abs=1e-4) and B == pytest.approx(0.5417, abs=1e-4)


def test_bounds_limits():
    norms = {"lam_bar": 1.0, "anticommutator": 3.0, "h_inverse": 2.0}
    A = [localization_bounds(norms, t)[0] for t in (1e2, 1e4, 1e6, 1e8)]
    assert all(a > b for a, b in zip(A, A[1:])) and A[-1] < 1e-3
    assert localization_bounds({"lam_bar": 1.0, "anticommutator": 1.0, "h_inverse": 0.0}, 5.0) == (0.0, 1.0)


def test_bounds_below_T():
    with pytest.raises(ValueError):
        localization_bounds(linear(), 1.0)


# tameness


@pytest.mark.parametrize("name", list(MODELS))
def test_standard_models_tame(name):
    for key in ("model", "partner"):
        rep = check_tame(MODELS[name][key])
        assert all(r["ok"] for r in rep.values()), rep


def test_zero_h_fails_condition_3():
    rep = check_tame(linear(coefficients=(0.0,)))
    assert not rep["3"]["ok"] and "witness" in rep["3"]


def test_large_lambda_bar_fails_condition_5():
    rep = check_tame(linear(lam_bar=100.0))
    assert not rep["5"]["ok"]
    assert abs(rep["5"]["witness"]) == pytest.approx(0.5, abs=0.01)


def test_discrete_dirac_symmetric_and_anticommutator():
    m = linear(N=600)
    D = m.dense(0.0)
    assert np.allclose(D, D.T)
    # {D, h} ≈ V′ σ_x = 1 for V = x
    assert m.anticommutator_norm() == pytest.approx(1.0, abs=1e-9)


def test_kernel_of_linear_model():
    m = linear()
    P = eigenpacket(m, 5.0)
    assert P.dim == 1 and P.eigenvalues[0] < 1e-9
    assert P.residuals.max() < 1e-9
    assert np.allclose(P.vectors.T @ P.vectors, np.eye(1))


@pytest.mark.parametrize("name", list(MODELS))
def test_localization_holds(name):
    d = MODELS[name]
    m = d["model"]
    for k in range(5):
        rep = verify_localization(m, m.T * 2**k, d["lam"], d["margin"])
        assert rep["ok"]
    assert rep["A"] < 1.0 or name == "cubic"


def test_localization_mass_shrinks():
    m = linear()
    out = [verify_localization(m, t)["eigenvectors"][0]["outside"] for t in (5.0, 10.0, 20.0)]
    assert out[0] > out[1] > out[2]


# d_H


def test_grassmann_examples():
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert grassmann_distance(e1, e1) == 0.0
    assert grassmann_distance(e1, e2) == pytest.approx(np.sqrt(2))
    th = np.pi / 6
    assert grassmann_distance(e1, np.array([np.cos(th), np.sin(th)])) == pytest.approx(0.5176, abs=1e-4)


def test_grassmann_dimension_mismatch():
    with pytest.raises(ValueError):
        grassmann_distance(np.eye(4)[:, :2], np.eye(4)[:, :3])


@pytest.mark.parametrize("r", [1, 2, 3])
def test_grassmann_matches_search(r):
    rng = np.random.default_rng(r)
    E1, E2 = rng.normal(size=(7, r)), rng.normal(size=(7, r))
    E2 = E1 + 0.3 * E2
    out = grassmann_distance_bounds(E1, E2)
    assert out["search"] == pytest.approx(out["principal"], abs=1e-6)


def test_grassmann_triangle_inequality():
    rng = np.random.default_rng(3)
    for _ in range(200):
        A, B, C = (rng.normal(size=(6, 2)) for _ in range(3))
        assert grassmann_distance(A, C) <= grassmann_distance(A, B) + grassmann_distance(B, C) + 1e-12
        assert grassmann_distance(A, B) == pytest.approx(grassmann_distance(B, A))


# Φ


def test_phi_identity():
    m = linear()
    rep = phi_map(m, m, margin=40.0, lam=0.5, t=5.0)
    assert np.allclose(rep["matrix"], np.eye(1))
    assert rep["distance"] < 1e-12


@pytest.mark.parametrize("name", list(MODELS))
def test_phi_isomorphism(name):
    d = MODELS[name]
    out = search_T0(d["model"], d["partner"], d["margin"], d["lam"])
    assert out["found"]
    last = out["sweep"][-1]
    assert last["min_singular_value"] >= 0.9 and last["distance"] < 0.1


def test_phi_rejects_mismatched_glue():
    d = MODELS["linear"]
    with pytest.raises(ValueError):
        phi_map(d["model"], d["partner"], margin=3.0, lam=0.5, t=5.0)


def test_spectral_collision():
    m = linear(lam_bar=20.0)
    lam = float(eigenpacket(m, 5.0, 20.0).eigenvalues[1])
    with pytest.raises(SpectralCollision):
        phi_map(m, m, margin=1.0, lam=lam, t=5.0)


def test_phi_coherence_improves():
    d = MODELS["quadratic"]
    third = TameTupleModel("q3", (-4.5, 4.5), 900, (-1.0, 0.0, 1.0), d["model"].F, 1.0, 5.0, stretch=1.5, stretch_radius=4.4)
    models = (d["model"], d["partner"], third)
    small, large = (phi_coherence(models, d["margin"], d["lam"], t) for t in (5.0, 20.0))
    assert large < small and large < 1e-2


# eigenvalue to distance


def test_certificate_examples():
    assert eigenvalue_to_distance(1.0, [0.2], [0.2])["distance_bound"] == 0.0
    out = eigenvalue_to_distance(1.0, [0.1, 0.5], [0.11, 0.5], delta=0.01)
    assert out["per_step"] == pytest.approx(0.04)


def test_certificate_gap_violation():
    with pytest.raises(ValueError):
        eigenvalue_to_distance(1.0, [0.9], [0.95], delta=0.06)


def test_certificate_dominates_measured_distance():
    rng = np.random.default_rng(11)
    n, r, lam = 40, 3, 1.0
    for _ in range(20):
        low = np.sort(rng.uniform(0.0, 0.5, r))
        high = rng.uniform(lam, 5.0, n - r)
        Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        A = Q @ np.diag(np.concatenate([low, high])) @ Q.T
        E0 = Q[:, :r]
        E = E0 + 0.02 * rng.normal(size=(n, r))
        Qe, _ = np.linalg.qr(E)
        ritz = np.linalg.eigvalsh(Qe.T @ A @ Qe)
        cert = eigenvalue_to_distance(lam, low, ritz)
        assert cert["distance_bound"] >= grassmann_distance(E, E0) - 1e-12


# model files


def test_load_model_roundtrip(tmp_path):
    m = MODELS["cubic"]["partner"]
    path = tmp_path / "m.json"
    import json

    path.write_text(json.dumps(m.to_json()))
    assert load_model(path) == m
    with pytest.raises(ValueError):
        load_model({"interval": [0, 1]})
