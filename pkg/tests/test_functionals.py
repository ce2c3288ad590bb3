import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    integral_abs_power,
    integral_cubic_derivative,
    integral_momentum,
)
from torusdnls.dynamics import step_ifrk4
from torusdnls.functionals import (
    ENERGY_REPORT_COLUMNS,
    batch_energy_drift_rate,
    batch_fl_norm,
    batch_full_energy,
    batch_gauged_E_rate,
    batch_gauged_energy,
    batch_gauged_H_rate,
    batch_gauged_hamiltonian,
    batch_hamiltonian,
    batch_kinetic,
    batch_l2_norm,
    batch_mass,
    batch_nonlinear_parts,
    energy_E,
    energy_report,
    full_energy,
    gauged_E,
    gauged_H,
    hamiltonian_H,
    mass,
    momentum_X,
    nonlinear_parts,
    psi,
)
from torusdnls.spectral import SpectralState

PI = np.pi
RNG = np.random.default_rng(207)


def random_batch(count, bandwidth, scale=0.4):
    z = RNG.standard_normal((count, 2 * bandwidth + 1, 2))
    return scale * (z[..., 0] + 1j * z[..., 1])


def single_mode(n, c, bandwidth=4):
    return SpectralState.from_modes(bandwidth, {n: c})


# ---------------------------------------------------------------------------
# closed forms on a single Fourier mode c e^{inx}


@pytest.mark.parametrize("n,c", [(0, 0.7), (2, 0.5 + 0.3j), (-3, 1.1j)])
def test_single_mode_closed_forms(n, c):
    state = single_mode(n, c)
    a2 = abs(c) ** 2
    assert mass(state) == pytest.approx(a2, rel=1e-14)
    assert psi(state) == pytest.approx(2 * n * a2 - 0.5 * a2**2, rel=1e-13, abs=1e-14)
    assert hamiltonian_H(state) == pytest.approx(
        -2 * PI * n * a2 + PI * a2**2, rel=1e-13, abs=1e-14
    )
    assert energy_E(state) == pytest.approx(
        2 * PI * n**2 * a2 - 3 * PI * n * a2**2 + PI * a2**3, rel=1e-13, abs=1e-14
    )
    assert gauged_H(state) == pytest.approx(
        -2 * PI * n * a2 + PI * a2**2, rel=1e-13, abs=1e-14
    )
    assert gauged_E(state) == pytest.approx(
        2 * PI * n**2 * a2 + PI * n * a2**2 + PI * a2**3, rel=1e-13, abs=1e-14
    )
    assert momentum_X(state) == pytest.approx(-2j * PI * n * a2, abs=1e-14)


def test_single_mode_nonlinear_parts():
    n, c = 2, 0.8
    a2 = abs(c) ** 2
    nl, f, g, k = nonlinear_parts(single_mode(n, c))
    assert f == pytest.approx(PI * n * a2**2, rel=1e-13)
    assert g == pytest.approx(-PI * a2**3, rel=1e-13)
    assert k == pytest.approx(-4 * PI * n * a2**2 + 2 * PI * a2**3, rel=1e-13)
    assert nl == pytest.approx(f + g + k, rel=1e-14)


def test_single_mode_gauge_invariant_energy_matches_plain():
    # a one-mode field is unchanged by the gauge up to rotation, so the
    # combined energy coincides with the plain one
    state = single_mode(3, 0.6 - 0.2j)
    assert full_energy(state) == pytest.approx(energy_E(state), rel=1e-13)


# ---------------------------------------------------------------------------
# dense-grid quadrature oracles on random multi-mode fields


def test_energy_matches_dense_quadrature():
    bw = 6
    coeffs = random_batch(1, bw)[0]
    kinetic = integral_abs_power(1j * np.arange(-bw, bw + 1) * coeffs, bw, 2)
    cubic = integral_cubic_derivative(coeffs, bw)
    sextic = integral_abs_power(coeffs, bw, 6)
    ref = kinetic + 1.5 * cubic + 0.5 * sextic
    state = SpectralState(bw, coeffs)
    assert energy_E(state) == pytest.approx(ref, rel=1e-12)


def test_hamiltonian_matches_dense_quadrature():
    bw = 6
    coeffs = random_batch(1, bw)[0]
    ref = integral_momentum(coeffs, bw) + 0.5 * integral_abs_power(coeffs, bw, 4)
    assert hamiltonian_H(SpectralState(bw, coeffs)) == pytest.approx(ref, rel=1e-12)


def test_gauged_energies_match_dense_quadrature():
    bw = 5
    coeffs = random_batch(1, bw)[0]
    m0 = float(np.sum(np.abs(coeffs) ** 2))
    i2 = integral_abs_power(coeffs, bw, 2)
    i4 = integral_abs_power(coeffs, bw, 4)
    kinetic = integral_abs_power(1j * np.arange(-bw, bw + 1) * coeffs, bw, 2)
    cubic = integral_cubic_derivative(coeffs, bw)
    mom = integral_momentum(coeffs, bw)
    state = SpectralState(bw, coeffs)
    assert gauged_H(state) == pytest.approx(mom - 0.5 * i4 + 2 * PI * m0**2, rel=1e-12)
    assert gauged_E(state) == pytest.approx(
        kinetic - 0.5 * cubic + i2 * i4 / (4 * PI), rel=1e-12
    )
    assert psi(state) == pytest.approx(-mom / PI + i4 / (4 * PI) - m0**2, rel=1e-12)


def test_nonlinear_parts_match_dense_quadrature():
    bw = 5
    coeffs = random_batch(1, bw)[0]
    i2 = integral_abs_power(coeffs, bw, 2)
    i4 = integral_abs_power(coeffs, bw, 4)
    cubic = integral_cubic_derivative(coeffs, bw)
    mom = integral_momentum(coeffs, bw)
    nl, f, g, k = nonlinear_parts(SpectralState(bw, coeffs))
    assert f == pytest.approx(-0.5 * cubic, rel=1e-12)
    assert g == pytest.approx(-i2 * i4 / (4 * PI), rel=1e-12)
    assert k == pytest.approx(i2 * mom / PI + i2**3 / (4 * PI**2), rel=1e-12)
    assert nl == pytest.approx(f + g + k, rel=1e-13)


# ---------------------------------------------------------------------------
# structural identities


def test_energy_ladder_identity():
    coeffs = random_batch(40, 6)
    m0 = batch_mass(coeffs)
    kinetic = batch_kinetic(coeffs, 6)
    nl = batch_nonlinear_parts(coeffs, 6)[0]
    full = batch_full_energy(coeffs, 6)
    np.testing.assert_allclose(full, kinetic + nl, rtol=1e-11, atol=1e-12)
    assert m0.shape == (40,)


def test_batch_agrees_with_scalar():
    coeffs = random_batch(8, 5)
    full = batch_full_energy(coeffs, 5)
    ham = batch_hamiltonian(coeffs, 5)
    for i in range(8):
        state = SpectralState(5, coeffs[i])
        assert full[i] == pytest.approx(full_energy(state), rel=1e-14)
        assert ham[i] == pytest.approx(hamiltonian_H(state), rel=1e-14)


def test_l2_norm_is_parseval():
    coeffs = random_batch(3, 4)
    np.testing.assert_allclose(
        batch_l2_norm(coeffs),
        np.sqrt(2 * PI * np.sum(np.abs(coeffs) ** 2, axis=-1)),
        rtol=1e-14,
    )


def test_fl_norm_single_mode_and_inf():
    coeffs = np.zeros((1, 9), dtype=complex)
    coeffs[0, 7] = 2.0  # mode n = 3 at bandwidth 4
    got = batch_fl_norm(coeffs, 4, 0.5, 2.0)
    assert got[0] == pytest.approx(2.0 * 10.0**0.25, rel=1e-14)
    assert batch_fl_norm(coeffs, 4, 0.5, np.inf)[0] == pytest.approx(
        2.0 * 10.0**0.25, rel=1e-14
    )
    with pytest.raises(ValueError):
        batch_fl_norm(coeffs, 4, 0.5, 0.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.05, max_value=3.0))
def test_full_energy_cubic_scaling_of_quartic_term(t):
    # under c -> t c the kinetic part scales as t^2, F and K-momentum as t^4,
    # G and the cubic-in-mass terms as t^6; verify by polynomial recombination
    base = np.array([[0.3 + 0.1j, -0.2j, 0.5, 0.1 - 0.4j, 0.25]])
    bw = 2
    _, f1, g1, _ = batch_nonlinear_parts(base, bw)
    _, ft, gt, _ = batch_nonlinear_parts(t * base, bw)
    assert ft[0] == pytest.approx(t**4 * f1[0], rel=1e-10, abs=1e-12)
    assert gt[0] == pytest.approx(t**6 * g1[0], rel=1e-10, abs=1e-12)


def test_energy_report_round_trip():
    state = SpectralState(3, random_batch(1, 3)[0])
    report = energy_report(state)
    row = report.to_json_dict()
    assert tuple(row.keys()) == ENERGY_REPORT_COLUMNS
    assert row["m"] == mass(state)
    assert row["full_E"] == full_energy(state)
    assert row["X_im"] == momentum_X(state).imag
    assert report.to_csv_row() == [row[k] for k in ENERGY_REPORT_COLUMNS]


# ---------------------------------------------------------------------------
# production rates of the energies under the truncated flow


def test_rates_vanish_when_products_stay_in_band():
    # modes {-1, 0, 1} produce quintic content up to |n| = 5 only
    coeffs = np.zeros((1, 13), dtype=complex)
    coeffs[0, 5:8] = [0.2 - 0.1j, 0.4, 0.3j]
    for fn in (batch_gauged_E_rate, batch_gauged_H_rate, batch_energy_drift_rate):
        assert abs(fn(coeffs, 6)[0]) < 1e-14


def test_drift_rate_combines_gauged_rates():
    coeffs = random_batch(10, 4)
    m0 = batch_mass(coeffs)
    combined = batch_gauged_E_rate(coeffs, 4) + 2.0 * m0 * batch_gauged_H_rate(coeffs, 4)
    np.testing.assert_allclose(
        batch_energy_drift_rate(coeffs, 4), combined, rtol=1e-10, atol=1e-13
    )


def test_rates_match_finite_differences_along_flow():
    bw = 8
    coeffs = random_batch(1, bw, scale=0.3)

    def centered(fn, h):
        fwd = step_ifrk4(coeffs, bw, h)
        back = step_ifrk4(coeffs, bw, -h)
        return (fn(fwd, bw) - fn(back, bw)) / (2.0 * h)

    for fn, rate in (
        (batch_gauged_hamiltonian, batch_gauged_H_rate),
        (batch_gauged_energy, batch_gauged_E_rate),
        (batch_full_energy, batch_energy_drift_rate),
    ):
        h = 1e-4
        fd = (4.0 * centered(fn, h / 2.0) - centered(fn, h)) / 3.0
        assert fd[0] == pytest.approx(rate(coeffs, bw)[0], rel=1e-6, abs=1e-10)
