import math

import numpy as np
import pytest

import filmgp

C = 1e-4


def test_reflection_round_trip():
    s = filmgp.AcousticSetup.standard()
    for h in (2e-6, 5e-6):
        mag, phase = filmgp.forward_reflection(s, h)
        assert filmgp.invert_amplitude(s, mag) == pytest.approx(h, rel=1e-9)
        assert filmgp.invert_phase(s, phase) == pytest.approx(h, rel=1e-9)


def test_errors_carry_codes():
    s = filmgp.AcousticSetup.standard()
    with pytest.raises(filmgp.FilmgpError) as info:
        filmgp.invert_amplitude(s, 0.995)
    assert info.value.code == "out-of-range"


def test_gram_is_symmetric_psd():
    x = np.linspace(0, 6, 25).reshape(-1, 1)
    k = filmgp.gram("periodic", {"length_scale": 0.8}, x)
    assert np.allclose(k, k.T)
    assert np.linalg.eigvalsh(k).min() > -1e-8 * np.trace(k) / len(x)


def test_gp_interpolates():
    x = np.linspace(0, 1, 8).reshape(-1, 1)
    y = np.sin(3 * x[:, 0])
    m = filmgp.fit_gp("squared_exponential", {"length_scale": 0.3}, x, y, 1e-8)
    mean, var = m.predict(x)
    assert np.allclose(mean, y, atol=1e-4)
    assert np.all(var >= 0)
    assert math.isfinite(m.log_marginal_likelihood())


def test_qbps_quadratic():
    r = filmgp.qbps_minimize(lambda v: (v[0] - 1) ** 2 + (v[1] + 2) ** 2,
                             [(-5, 5), (-5, 5)], iterations=150, restarts=0, seed=3)
    assert r["x"] == pytest.approx([1, -2], abs=1e-4)
    assert all(a >= b for a, b in zip(r["trace"], r["trace"][1:]))


def test_film_fit_recovers_location():
    g = filmgp.BearingGeometry.standard()
    angles = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
    h = filmgp.film_thickness(g, 0.5, 0.9, angles)
    _, loc = filmgp.fit_film(angles, h, g, seed=1)
    assert loc["eccentricity"] == pytest.approx(0.5, abs=1e-3)
    assert abs(loc["theta_rad"] - 0.9) < math.radians(0.2)


def test_locate_on_equilibrium_dataset():
    g = filmgp.BearingGeometry.standard()
    rows = ["rho_m,theta_rad,y_ratio,speed_rpm,load_N"]
    runs = [(rpm, 10000.0) for rpm in (100, 200, 300, 400, 600, 800)]
    top = max(r / w for r, w in runs)
    for rpm, w in runs:
        e = filmgp.equilibrium(g, rpm, w)
        rows.append(f"{e['rho_m']!r},{e['theta_rad']!r},{(rpm / w) / top!r},{rpm!r},{w!r}")
    ds = filmgp.Dataset.from_csv("\n".join(rows) + "\n", C)
    assert len(ds) == 6
    model = filmgp.fit_location(ds, "A", seed=1)
    out = filmgp.locate(model, float(ds.labels[2]), C)
    assert out["map"].shape == (60, 90)
    assert 0 < out["credible_area_fraction"] <= 1
    assert np.argmax(out["map"]) == out["argmax"][0] * 90 + out["argmax"][1]


def test_config_round_trip():
    cfg = filmgp.default_config()
    assert len(cfg["runs"]) == 15
    assert filmgp.check_config(cfg) == cfg
    with pytest.raises(filmgp.FilmgpError):
        filmgp.check_config({"not_a_key": 1})
