import math

import numpy as np
import pytest

import blowup


def test_isotropic_exponents():
    r3 = blowup.compute_exponent([1, 1], 3)
    assert r3["lambda1"] == pytest.approx(1.0, abs=1e-10)
    assert r3["alpha"] == pytest.approx(math.sqrt(2) - 1, abs=1e-10)
    assert r3["epsilon_exponent"] == pytest.approx((math.sqrt(2) - 2) / 2, abs=1e-10)
    r4 = blowup.compute_exponent([1, 1, 1], 4)
    assert r4["lambda1"] == pytest.approx(2.0, abs=1e-8)
    assert r4["multiplicity"] == 3


def test_normalize_and_errors():
    assert blowup.normalize([1, 3], 3) == [3.0, 1.0]
    with pytest.raises(blowup.BlowupError) as e:
        blowup.normalize([0, 1], 3)
    assert e.value.kind == "NonPositiveEntry"
    with pytest.raises(blowup.BlowupError) as e:
        blowup.compute_exponent([1, 1, 1, 1], 5)
    assert e.value.kind == "UnsupportedDimension"
    assert issubclass(blowup.BlowupError, ValueError)


def test_circle_and_dirichlet():
    assert blowup.dirichlet_mu1(1.0)["mu1"] == pytest.approx(3.0, abs=1e-8)
    pair = blowup.circle_pair([4, 1])
    assert pair["lambda1"] < 1.0 < pair["lambda2"]
    assert pair["lambda1"] == pytest.approx(blowup.dirichlet_mu1(-pair["beta"])["mu1"], rel=1e-12)


def test_sphere_property_o():
    r = blowup.sphere_lambda1([1.05, 1.0, 0.95])
    assert r["multiplicity"] == 1
    assert all(sig is not None and sig.count(-1) == 1 for sig in r["parity_signatures"])


def test_series():
    s = blowup.series_coefficients(4, [1, 0, 0], axis=0)
    direct = blowup.sphere_lambda1([1.01, 1, 1], check_convergence=False)["lambda1"]
    # sign and size of the first-order term
    assert abs(direct - (s["lambda_base"] + 0.01 * s["c1"])) < 1e-3
    assert abs(direct - (s["lambda_base"] + 0.01 * s["c1"] + 1e-4 * s["c2"])) < abs(
        direct - (s["lambda_base"] + 0.01 * s["c1"])
    )


def test_disk_decay_matches_alpha():
    n_theta = 256
    mode = blowup.sample_circle_mode([4, 1], 1, n_theta)
    out = blowup.solve_disk([4, 1], np.asarray(mode["values"]), n_r=256)
    alpha = blowup.alpha_of_lambda(mode["mu"], 3)
    assert out["values"].shape == (256, n_theta)
    assert out["fitted_exponent"] == pytest.approx(alpha, rel=0.05)
    const = blowup.solve_disk([4, 1], np.full(n_theta, 2.0), n_r=64)
    assert np.allclose(const["values"], 2.0, atol=1e-12)
    assert const["fitted_exponent"] is None


def test_reduction():
    slopes = [np.zeros((3, 3)) for _ in range(3)]
    slopes[0][0, 2] = slopes[0][2, 0] = 0.1
    r = blowup.reduce(np.eye(3), slopes, sigma=0.5, eps=0.01)
    assert r["residual"] < 1e-12
    assert np.linalg.norm(r["x0"][:2]) <= r["R"]
    assert np.allclose(r["transform"], np.eye(3))


def test_verify_suite():
    checks = blowup.run_suite("reduction")
    assert checks and all(c["pass"] for c in checks)
