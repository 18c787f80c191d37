import numpy as np
import pytest

import kko


def test_sign_table():
    assert kko.sign_table(2) == {"alpha": -1, "alpha_prime": 1, "alpha_dd": -1}
    assert kko.measured_signs(0, 5)["alpha_prime"] == -1


def test_eta_chain():
    unit = kko.make_class(0, np.eye(1), np.eye(1))
    e1 = kko.eta_act(unit)
    e2 = kko.eta_act(e1)
    assert (e1.degree, kko.scalar_invariant(e1)) == (1, 1)
    assert (e2.degree, kko.scalar_invariant(e2)) == (2, 1)
    assert kko.scalar_invariant(kko.eta_act(e2)) == 0
    assert kko.spin_operator(e1) is None


def test_doubling():
    x = kko.make_class(0, np.diag([1.0, 1.0, 0.0]), np.eye(3))
    assert kko.scalar_invariant(kko.realify(kko.complexify(x), 0)) == 4


def test_invalid_class_raises():
    with pytest.raises(kko.KkoError):
        kko.make_class(1, np.array([[1j]]), np.eye(1))


def test_sequence():
    for a in "RCH":
        assert kko.verify_exactness(a)["all_pass"]


def test_models_and_invariants():
    h = kko.corpus("haldane")
    assert h.bloch([0.1, 0.2]).shape == (2, 2)
    assert kko.fhs_chern(h, 40) == 1
    assert kko.realspace_chern(h, 12)["value"] == 1
    assert kko.fhs_chern(kko.conjugate_model(h), 40) == -1
    km = kko.corpus("kane_mele")
    assert kko.classify(km)["label"] == "AII"
    assert kko.spin_chern_kane_mele(km, grid=30)["kane_mele"] == 1
    ssh = kko.corpus("ssh", {"v": 0.5, "w": 1.0})
    assert kko.realspace_winding(ssh, 30)["value"] == -kko.bloch_winding(ssh) == 1


def test_z2_desk_instance():
    r = kko.z2_eta_generator()
    assert r["z2"] == 1
    assert abs(r["spectral_flow"]) % 2 == 1


def test_coefficients():
    lam, mu = kko.chern_coefficients(2)
    assert lam == pytest.approx(-1.0)
    assert mu == pytest.approx(1.0 / 8.0)
