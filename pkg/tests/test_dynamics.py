import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusdnls.dynamics import (
    RHS_KINDS,
    TERM_KINDS,
    BlowUpError,
    Trajectory,
    batch_rhs,
    batch_rhs_nonlinear,
    batch_rhs_term,
    default_dt,
    divergence_analytic,
    divergence_fd,
    evolve,
    evolve_batch,
    flow_jacobian_fd,
    holomorphic_trace,
    holomorphic_trace_term,
    load_trajectory_csv,
    record_trajectory,
    rhs,
    step_ifrk4,
    wirtinger_trace_fd,
)
from torusdnls.functionals import full_energy, mass
from torusdnls.spectral import SpectralState, mode_numbers, translate

RNG = np.random.default_rng(314)


def random_state(bandwidth, scale=0.2):
    z = RNG.standard_normal((2 * bandwidth + 1, 2))
    return SpectralState(bandwidth, scale * (z[:, 0] + 1j * z[:, 1]))


# ---------------------------------------------------------------------------
# right-hand side structure


def test_unknown_kind_rejected():
    state = random_state(3)
    with pytest.raises(ValueError):
        rhs(state, "not_a_kind")
    with pytest.raises(ValueError):
        batch_rhs_term(state.coeffs, 3, "term_bogus")


def test_terms_sum_to_full_rhs():
    state = random_state(6)
    total = sum(batch_rhs_term(state.coeffs, 6, t) for t in TERM_KINDS)
    np.testing.assert_allclose(
        total, batch_rhs(state.coeffs, 6, "fgdnls"), rtol=1e-12, atol=1e-14
    )


def test_no_psi_drops_exactly_the_three_psi_terms():
    state = random_state(5)
    kept = ("term_linear", "term_cubic", "term_quintic", "term_mass_cubic")
    total = sum(batch_rhs_term(state.coeffs, 5, t) for t in kept)
    np.testing.assert_allclose(
        total, batch_rhs(state.coeffs, 5, "fgdnls_no_psi"), rtol=1e-12, atol=1e-14
    )


@pytest.mark.parametrize("kind", [k for k in RHS_KINDS if k != "fgdnls_psi_real"])
def test_nonlinear_rhs_is_mass_orthogonal(kind):
    # d/dt sum |c|^2 = 2 Re <F_nl(c), c> must vanish identically
    state = random_state(8, scale=0.5)
    f = batch_rhs_nonlinear(state.coeffs, 8, kind)
    pairing = float(np.real(np.sum(f * np.conj(state.coeffs))))
    assert abs(pairing) < 1e-13 * max(1.0, mass(state))


def test_psi_real_coupling_breaks_mass_conservation():
    state = random_state(8, scale=0.5)
    f = batch_rhs_nonlinear(state.coeffs, 8, "fgdnls_psi_real")
    pairing = float(np.real(np.sum(f * np.conj(state.coeffs))))
    assert abs(pairing) > 1e-4


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=-3.0, max_value=3.0))
def test_rhs_commutes_with_translation(a):
    coeffs = np.array(
        [0.21 - 0.04j, -0.1j, 0.3, 0.12 + 0.2j, -0.07 + 0.05j], dtype=complex
    )
    state = SpectralState(2, coeffs)
    lhs = rhs(translate(state, a), "fgdnls")
    rhs_then_move = translate(rhs(state, "fgdnls"), a)
    np.testing.assert_allclose(lhs.coeffs, rhs_then_move.coeffs, rtol=1e-12, atol=1e-14)


# ---------------------------------------------------------------------------
# stepping


def test_linear_kind_is_propagated_exactly():
    state = random_state(10, scale=1.0)
    dt = 0.37
    n = mode_numbers(10)
    stepped = step_ifrk4(state.coeffs, 10, dt, "linear")
    exact = np.exp(-1j * n**2 * dt) * state.coeffs
    np.testing.assert_allclose(stepped, exact, rtol=1e-14, atol=1e-15)


def test_fourth_order_convergence():
    state = random_state(8, scale=0.1)
    t_final = 0.25
    ref = evolve_batch(state.coeffs, 8, t_final, t_final / 1024)
    errors = []
    for steps in (16, 32, 64):
        out = evolve_batch(state.coeffs, 8, t_final, t_final / steps)
        errors.append(np.max(np.abs(out - ref)))
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    assert all(r > 12.0 for r in ratios), (errors, ratios)


def test_step_plan_handles_non_divisible_horizon():
    state = random_state(4)
    direct = evolve(state, 0.25, dt=0.1)
    # 0.25 = 2 steps of 0.1 plus a remainder step of 0.05
    manual = step_ifrk4(
        step_ifrk4(step_ifrk4(state.coeffs, 4, 0.1), 4, 0.1), 4, 0.05
    )
    np.testing.assert_allclose(direct.coeffs, manual, rtol=1e-14)


def test_evolve_validates_arguments():
    state = random_state(3)
    with pytest.raises(ValueError):
        evolve(state, 1.0, dt=-0.1)
    with pytest.raises(ValueError):
        evolve(state, -1.0, dt=0.1)


def test_default_dt_shrinks_with_amplitude():
    small = random_state(6, scale=0.01)
    big = SpectralState(6, 1000.0 * small.coeffs)
    assert default_dt(small) <= 1e-3
    assert default_dt(big) < default_dt(small)


def test_blow_up_raises_with_location():
    state = random_state(16, scale=30.0)
    with pytest.raises(BlowUpError) as info:
        evolve(state, 1.0, dt=0.05)
    assert info.value.time > 0
    assert abs(info.value.mode) <= 16


def test_mass_and_energy_conserved_on_short_run():
    # smooth data: spectral flux through the cutoff is negligible, so the
    # combined energy is conserved to rounding alongside the mass
    n = mode_numbers(12)
    z = RNG.standard_normal((25, 2))
    state = SpectralState(12, 0.3 * np.exp(-np.abs(n).astype(float)) * (z[:, 0] + 1j * z[:, 1]))
    out = evolve(state, 0.5, dt=1e-3)
    assert mass(out) == pytest.approx(mass(state), rel=1e-12)
    assert full_energy(out) == pytest.approx(full_energy(state), rel=1e-9)


# ---------------------------------------------------------------------------
# trajectory recording


def test_trajectory_round_trip(tmp_path):
    state = random_state(6, scale=0.15)
    traj = record_trajectory(state, 0.2, dt=1e-2, record_every=5)
    assert traj.column("t")[0] == 0.0
    assert traj.column("t")[-1] == pytest.approx(0.2)
    np.testing.assert_allclose(traj.column("m"), mass(state), rtol=1e-6)
    assert isinstance(traj.final_state, SpectralState)

    path = tmp_path / "traj.csv"
    traj.save_csv(path)
    back = load_trajectory_csv(path)
    np.testing.assert_array_equal(back.data, traj.data)


def test_trajectory_validates_record_every():
    with pytest.raises(ValueError):
        record_trajectory(random_state(3), 0.1, dt=0.01, record_every=0)


def test_trajectory_row_count():
    traj = record_trajectory(random_state(3), 0.1, dt=0.01, record_every=2)
    # rows at t = 0 plus every other step: 0.02, 0.04, 0.06, 0.08, 0.1
    assert traj.data.shape[0] == 6
    assert isinstance(traj, Trajectory)


# ---------------------------------------------------------------------------
# phase-space divergence


@pytest.mark.parametrize("kind", RHS_KINDS)
def test_divergence_closed_form_matches_finite_differences(kind):
    state = random_state(2, scale=0.4)
    fd = wirtinger_trace_fd(state, kind)
    closed = holomorphic_trace(state, kind)
    assert fd == pytest.approx(closed, rel=2e-7, abs=1e-7)


@pytest.mark.parametrize("term", TERM_KINDS)
def test_per_term_traces_match_finite_differences(term):
    state = random_state(2, scale=0.4)
    fd = wirtinger_trace_fd(state, term)
    closed = holomorphic_trace_term(state, term)
    assert fd == pytest.approx(closed, rel=2e-7, abs=1e-7)
    if term != "term_linear":
        assert abs(closed.imag) > 0  # traces are imaginary but not trivial


@pytest.mark.parametrize("kind", [k for k in RHS_KINDS if k != "fgdnls_psi_real"])
def test_volume_preserving_kinds_have_zero_divergence(kind):
    state = random_state(3, scale=0.5)
    assert divergence_analytic(state, kind) == 0.0
    assert abs(divergence_fd(state, kind)) < 1e-6


def test_psi_real_control_is_genuinely_compressive():
    state = random_state(3, scale=0.5)
    exact = divergence_analytic(state, "fgdnls_psi_real")
    assert abs(exact) > 1.0
    assert divergence_fd(state, "fgdnls_psi_real") == pytest.approx(exact, rel=1e-6)


def test_flow_jacobian_has_unit_determinant():
    state = random_state(2, scale=0.3)
    jac = flow_jacobian_fd(state, 0.1, 1e-2)
    det = np.linalg.det(jac)
    assert det == pytest.approx(1.0, abs=1e-7)


def test_psi_real_flow_contracts_volume():
    state = random_state(2, scale=0.3)
    jac = flow_jacobian_fd(state, 0.1, 1e-2, kind="fgdnls_psi_real")
    det = np.linalg.det(jac)
    assert abs(det - 1.0) > 1e-3
