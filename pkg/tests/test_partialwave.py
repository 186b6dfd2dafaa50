import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abvortex.core import AngleGrid, ScatterConfig, Spin, opening_angle
from abvortex.errors import ConfigurationError, DomainError, RegionError
from abvortex.partialwave import (SummationParams, build_phase_shifts, exact_amplitude,
                                  exact_amplitude_array, exact_xsec, forward_amplitude,
                                  identity_kernel, idealized_series, incident_wave,
                                  mode_order, required_n_max, _f0_windowed)

GAUSS = SummationParams(regulator="gaussian")


def ab_xsec(alpha, k, phi):
    """Idealized Aharonov-Bohm cross section for an infinitely thin vortex."""
    return math.sin(math.pi * alpha) ** 2 / (2 * math.pi * k * np.sin(phi / 2) ** 2)


def direct_geometric(phi, alpha, eta, n_terms=400000):
    """Brute-force Abel sum with explicit damping, independent of the closed form."""
    lam = 160.0 / n_terms
    n = np.arange(-n_terms, n_terms + 1)
    nu = np.abs(n - alpha) / (1 - eta)
    u = np.exp(1j * math.pi * (np.abs(n) - nu))
    out = []
    for p in np.atleast_1d(phi):
        vals = []
        for lmb in (lam, lam / 2, lam / 4):
            g = np.exp(-lmb * np.abs(n - alpha))
            vals.append(np.sum((u - 1) * g * np.exp(1j * n * p)))
        out.append((8 * vals[2] - 6 * vals[1] + vals[0]) / 3)
    return np.array(out)


@pytest.mark.parametrize("n, alpha, eta, expected", [
    (0, 0.0, 0.0, 0.0), (1, 0.5, 0.0, 0.5), (2, 0.5, 0.25, 2.0)])
def test_mode_order(n, alpha, eta, expected):
    assert mode_order(n, eta, alpha) == pytest.approx(expected)


def test_truncation_bound():
    assert required_n_max(100.0, 0.0) >= math.ceil(100.0) + 6 * 100 ** (1 / 3) + 20
    # negative-deficit cones need more modes to reach nu ~ k r_c
    n = required_n_max(100.0, -0.5)
    assert n / 1.5 >= 100 + 6 * 100 ** (1 / 3)
    with pytest.raises(ConfigurationError):
        build_phase_shifts(ScatterConfig(0.0), 100.0, SummationParams(n_max=50))


def test_core_factors_vanish_for_tiny_core():
    x = 1e-8
    table = build_phase_shifts(ScatterConfig(0.0), x)
    others = np.abs(table.core_factor[table.n != 0])
    assert np.all(others < 1e-7)
    # small-argument s-wave: J0/H0 -> 1/(1 + (2i/pi)(ln(x/2) + gamma))
    s_wave = 1.0 / (1.0 + 2j / math.pi * (math.log(x / 2) + np.euler_gamma))
    assert table.entry(0)[1] == pytest.approx(s_wave, rel=1e-12)


def test_half_integer_core_factor():
    x = 3.7
    table = build_phase_shifts(ScatterConfig(0.5), x)
    nu, t = table.entry(1)
    assert nu == 0.5
    assert t == pytest.approx(math.sin(x) / complex(math.sin(x), -math.cos(x)), abs=1e-13)


def test_half_flux_mode_pairing():
    table = build_phase_shifts(ScatterConfig(0.5), 5.0)
    for n in range(-10, 12):
        assert table.entry(n) == table.entry(1 - n)


def test_per_mode_unitarity():
    for cfg, k in [(ScatterConfig(0.3), 20.0), (ScatterConfig(0.1, 0.3), 50.0),
                   (ScatterConfig(0.7, -0.5, 2.0), 10.0)]:
        table = build_phase_shifts(cfg, k)
        np.testing.assert_allclose(np.abs(table.reflection()), 1.0, atol=1e-10)
        assert np.all(np.abs(table.core_factor) <= 1.0)


def test_closed_form_abel_limit_matches_brute_force():
    phi = np.array([0.4, -1.3, 2.9])
    for alpha, eta in [(0.3, 0.0), (0.25, 0.2), (1.7, -0.5)]:
        ref = direct_geometric(phi, alpha, eta)
        got = idealized_series(phi, alpha, eta)
        np.testing.assert_allclose(got, ref, rtol=1e-6)


@pytest.mark.parametrize("regulator", ["gaussian", "cesaro", "abel"])
def test_regulator_families_agree_with_closed_form(regulator):
    phi = np.array([0.5, 1.5, -2.5])
    strength = {"abel": 2e-3, "gaussian": 2000.0, "cesaro": 40000.0}[regulator]
    params = SummationParams(regulator=regulator, strength=strength, rtol=1e-4)
    for alpha, eta in [(0.3, 0.0), (0.25, 0.2)]:
        np.testing.assert_allclose(idealized_series(phi, alpha, eta, params),
                                   idealized_series(phi, alpha, eta), rtol=1e-5)


def test_long_wavelength_is_aharonov_bohm():
    k, phi = 1e-4, math.pi / 2
    cfg = ScatterConfig(0.3)
    abel, _ = exact_xsec(cfg, k, [phi])
    gauss, _ = exact_xsec(cfg, k, [phi], GAUSS)
    assert gauss[0] == pytest.approx(abel[0], rel=1e-8)
    # the idealized series alone is the textbook result; the core adds O((k r_c)**(2 nu_min))
    f0 = idealized_series([phi], 0.3, 0.0, GAUSS)[0] / math.sqrt(2 * math.pi * k)
    assert abs(f0) ** 2 == pytest.approx(ab_xsec(0.3, k, phi), rel=1e-8)
    assert abel[0] == pytest.approx(ab_xsec(0.3, k, phi), rel=3 * k ** 0.6)


@pytest.mark.parametrize("krc", [0.01, 1.0, 5.0, 20.0])
def test_forward_null_at_half_flux(krc):
    cfg = ScatterConfig(0.5)
    assert abs(forward_amplitude(cfg, krc)) < 1e-3
    assert identity_kernel(cfg, krc).entries[0][2] == pytest.approx(0.0, abs=1e-15)


def test_optical_theorem_hard_disk():
    cfg, k = ScatterConfig(0.0), 20.0
    m = 4096
    phi = np.linspace(-math.pi, math.pi, m, endpoint=False)
    f, _ = exact_amplitude_array(cfg, k, phi, regulated=True)
    sigma = np.sum(np.abs(f) ** 2) * 2 * math.pi / m
    lhs = 2 * math.sqrt(2 * math.pi / k) * forward_amplitude(cfg, k).imag
    assert lhs == pytest.approx(sigma, rel=1e-3)


def test_regulator_independence_at_moderate_hardness():
    phi = np.linspace(1.0, 3.0, 9)
    for cfg in (ScatterConfig(0.3), ScatterConfig(0.25, 0.2)):
        a, _ = exact_xsec(cfg, 20.0, phi)
        g, _ = exact_xsec(cfg, 20.0, phi, GAUSS)
        np.testing.assert_allclose(g, a, rtol=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.9, 0.9), st.sampled_from([0.0, 0.2, -0.5]), st.integers(-2, 2))
def test_flux_periodicity_and_reversal(alpha, eta, shift):
    phi = np.array([-2.7, -1.3, 0.6, 2.2])
    base, _ = exact_xsec(ScatterConfig(alpha, eta), 7.0, phi)
    moved, _ = exact_xsec(ScatterConfig(alpha + shift, eta), 7.0, phi)
    mirrored, _ = exact_xsec(ScatterConfig(-alpha, eta), 7.0, -phi)
    np.testing.assert_allclose(moved, base, rtol=1e-9)
    np.testing.assert_allclose(mirrored, base, rtol=1e-9)


def test_singular_guard():
    cfg = ScatterConfig(0.3)
    with pytest.raises(DomainError):
        exact_amplitude_array(cfg, 100.0, [0.01])
    _, flags = exact_amplitude_array(cfg, 100.0, [0.01, 1.0], regulated=True)
    assert list(flags) == ["distributional", ""]
    with pytest.raises(DomainError):
        exact_amplitude_array(ScatterConfig(0.3, 0.2), 100.0, [opening_angle(0.2) + 0.01])


def test_unpolarized_branches_and_determinism():
    cfg = ScatterConfig(0.1, 0.2, spin=Spin.UNPOLARIZED)
    grid = AngleGrid.linspace(1.0, 3.0, 40)
    samples = exact_amplitude(cfg, 30.0, grid)
    assert len(samples) == 80
    assert sorted({round(s.alpha_eff, 12) for s in samples}) == [0.0, 0.2]
    x1, _ = exact_xsec(cfg, 30.0, grid.phi)
    x2, _ = exact_xsec(cfg, 30.0, grid.phi, threads=4)
    assert np.array_equal(x1, x2)
    up, _ = exact_xsec(ScatterConfig(0.0, 0.2), 30.0, grid.phi)
    down, _ = exact_xsec(ScatterConfig(0.2, 0.2), 30.0, grid.phi)
    np.testing.assert_allclose(x1, 0.5 * (up + down), rtol=1e-12)


def test_identity_kernel():
    free = identity_kernel(ScatterConfig(0.0), 1.0)
    assert free.entries == ((0.0, 1.0, 1.0),) and free.overall_phase == 1.0
    half = identity_kernel(ScatterConfig(0.5), 1.0)
    assert half.entries[0][2] == pytest.approx(0.0, abs=1e-15)
    cone = identity_kernel(ScatterConfig(0.25, 0.2), 1.0)
    (s1, p1, w1), (s2, p2, w2) = cone.entries
    assert s1 == pytest.approx(math.pi / 4) and s2 == pytest.approx(-math.pi / 4)
    assert p1 == pytest.approx(np.exp(1j * 0.25 * 1.25 * math.pi))
    assert p2 == pytest.approx(np.exp(-1j * 0.25 * 1.25 * math.pi))
    assert w1 == w2 == 0.5 and cone.overall_phase == 1.0
    shifted = identity_kernel(ScatterConfig(0.25, 0.2, r_c=1.0, xi_c=1.2), 3.0)
    assert shifted.overall_phase == pytest.approx(np.exp(2j * 3.0 * -0.2))


def test_identity_kernel_matches_regulated_delta_mass():
    # the damped series minus its finite part integrates to 2 pi (weight * phase)
    # across each singular direction, less 2 pi at phi = 0 from the subtracted unity
    lam, half = 2e-3, 0.2
    captured = 2 / math.pi * math.atan(half / lam)  # Poisson-kernel mass inside the window
    for alpha, eta in [(0.3, 0.0), (0.25, 0.2), (0.7, -0.5)]:
        kern = identity_kernel(ScatterConfig(alpha, eta), 1.0)
        for shift, phase, weight in kern.entries:
            # even point count straddles the pole so the principal-value part cancels
            phi = shift + np.linspace(-half, half, 2000)
            damped = _f0_windowed(phi, alpha, eta, "abel", lam)
            smooth = idealized_series(phi, alpha, eta)
            mass = np.trapezoid(damped - smooth, phi) / captured
            expected = 2 * math.pi * (weight * phase - (1.0 if shift == 0.0 else 0.0))
            assert abs(mass - expected) < 1e-2, (alpha, eta, shift, mass, expected)


def test_incident_wave():
    k, r = 2.0, 7.3
    assert incident_wave(ScatterConfig(0.0), k, r, math.pi) == pytest.approx(np.exp(-1j * k * r))
    assert incident_wave(ScatterConfig(0.5), k, r, math.pi) == pytest.approx(np.exp(-1j * k * r))
    e, kr = 0.2, 50.0
    direct = (1 - e) * 2 * np.exp(-1j * kr * math.cos((1 - e) * math.pi))
    assert incident_wave(ScatterConfig(0.0, e), 1.0, kr, 0.0) == pytest.approx(direct)
    a, phi = 0.3, 2.0
    one = (1 - e) * np.exp(-1j * kr * math.cos((1 - e) * (phi - math.pi))) * np.exp(1j * a * (phi - math.pi))
    assert incident_wave(ScatterConfig(a, e), 1.0, kr, phi) == pytest.approx(one)
    with pytest.raises(RegionError):
        incident_wave(ScatterConfig(0.0, -0.5), 1.0, kr, 0.0)
    with pytest.raises(DomainError):
        incident_wave(ScatterConfig(0.0, 0.6), 1.0, kr, 0.0)
