import math

import pytest

import sinailab


def test_bessel_values():
    assert sinailab.bessel_i(1.0, 2.0) == pytest.approx(1.5906368546, rel=1e-9)
    assert sinailab.bessel_k(0.5, 1.0) == pytest.approx(0.4610685044, rel=1e-8)


def test_fixed_point():
    z = sinailab.kotani_fixed_point(0.5)
    assert 1 + z / 2 - z * z == pytest.approx(0.0, abs=1e-12)


def test_rng_reproducible():
    a = sinailab.RngStream(7, 1)
    b = sinailab.RngStream(7, 1)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
    assert a.split(3).stream_id == b.split(3).stream_id


def test_flat_potential_and_kotani():
    p = sinailab.Potential.flat(0.0, 0.01, 20.0)
    assert p.a_kappa(1.5) == pytest.approx(1.5)
    assert sinailab.kotani_rhs(p, 0.5, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-6)


def test_potential_round_trip(tmp_path):
    p = sinailab.Potential(0.0, 0.01, seed=4)
    p.realize(-1.0, 1.0)
    path = str(tmp_path / "w.bin")
    p.save(path)
    q = sinailab.Potential.load(path)
    assert q.w(0.37) == p.w(0.37)


def test_xi_nonnegative():
    xs = sinailab.simulate_xi(0.0, 5.0, 1e-3, seed=2)
    assert len(xs) >= 5001
    assert min(xs) >= 0.0


def test_exit_area_mean():
    xs = sinailab.exit_area_samples(0.0, 1.0, 2000, seed=3)
    assert sum(xs) / len(xs) == pytest.approx(1.0, rel=0.08)


def test_verify_report():
    assert "thm41" in sinailab.identity_names()
    rep = sinailab.verify("lamperti", n=300, seed=5)
    assert rep["identity"] == "lamperti"
    assert rep["config"]["n"] == 300
    assert isinstance(rep["passed"], bool)


def test_errors():
    with pytest.raises(ValueError):
        sinailab.verify("bogus")
    with pytest.raises(ValueError):
        sinailab.verify("lamperti", colour=1)
    with pytest.raises(sinailab.BudgetError):
        sinailab.estimate("annealed", max_seconds=1e-6)


def test_default_config():
    c = sinailab.default_config("verify", "lemma22")
    assert c["n"] == 1000000
