"""Time evolution of band-limited fields.

The truncated gauged flow ("fgdnls") is the primary dynamics:

    v_t = i v_xx - P_N(v^2 conj(v_x)) + (i/2) P_N(|v|^4 v)
          - i psi(v) v - i m(v) P_N(|v|^2 v)

Additional right-hand sides share the same stepper:

    gdnls_plus       fgdnls plus the transport term 2 m(v) v_x
    dnls             u_t = i u_xx + P_N((|u|^2 u)_x), the ungauged equation
    linear           v_t = i v_xx
    fgdnls_no_psi    fgdnls with the -i psi(v) v term removed
    fgdnls_psi_real  fgdnls with -i psi(v) v replaced by -psi(v) v; the
                     real coupling makes the flow compress phase volume,
                     giving a control with genuinely nonzero divergence

All nonlinear products are formed on grids large enough that truncation
back to the band is free of aliasing. The stepper is a fourth-order
Runge-Kutta method on the integrating-factor transform, so the stiff
linear part is propagated exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    batch_energy,
    batch_fl_norm,
    batch_full_energy,
    batch_gauged_energy,
    batch_gauged_hamiltonian,
    batch_hamiltonian,
    batch_l2_norm,
    batch_mass,
    batch_mode_momentum,
    batch_nonlinear_parts,
)
from .spectral import (
    SpectralState,
    TWO_PI,
    coefficients_from_grid,
    dealias_grid_size,
    evaluate_on_grid,
    fl_norm,
    mode_numbers,
)

RHS_KINDS = (
    "fgdnls",
    "gdnls_plus",
    "dnls",
    "linear",
    "fgdnls_no_psi",
    "fgdnls_psi_real",
)

# the seven summands of the fgdnls right-hand side, addressable one at a
# time so their phase-space traces can be checked independently
TERM_KINDS = (
    "term_linear",
    "term_cubic",
    "term_quintic",
    "term_psi_momentum",
    "term_psi_quartic",
    "term_psi_mass_sq",
    "term_mass_cubic",
)

DEFAULT_FL_S = 2.0 / 3.0 - 0.01
DEFAULT_FL_R = 3.0


class BlowUpError(RuntimeError):
    """Raised when an evolution produces non-finite coefficients."""

    def __init__(self, time: float, mode: int, amplitude: float):
        self.time = time
        self.mode = mode
        self.amplitude = amplitude
        super().__init__(
            f"non-finite state at t={time:.6g}; largest finite amplitude "
            f"{amplitude:.3e} at mode {mode}"
        )


def _check_kind(kind: str) -> None:
    if kind not in RHS_KINDS:
        raise ValueError(f"unknown rhs kind {kind!r}, expected one of {RHS_KINDS}")


def batch_rhs_nonlinear(coeffs: np.ndarray, bandwidth: int, kind: str = "fgdnls") -> np.ndarray:
    """Right-hand side minus the linear dispersion term i v_xx."""
    _check_kind(kind)
    n = mode_numbers(bandwidth)
    if kind == "linear":
        return np.zeros_like(coeffs)

    if kind == "dnls":
        m = dealias_grid_size(bandwidth, 4)
        v = evaluate_on_grid(coeffs, bandwidth, m)
        cubic = coefficients_from_grid(np.abs(v) ** 2 * v, bandwidth)
        return 1j * n * cubic

    m = dealias_grid_size(bandwidth, 6)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    vx = evaluate_on_grid(coeffs * (1j * n), bandwidth, m)
    abs_sq = np.abs(v) ** 2
    cubic_d = coefficients_from_grid(v * v * np.conj(vx), bandwidth)
    quintic = coefficients_from_grid(abs_sq**2 * v, bandwidth)
    cubic_m = coefficients_from_grid(abs_sq * v, bandwidth)

    m0 = batch_mass(coeffs)[..., None]
    out = -cubic_d + 0.5j * quintic - 1j * m0 * cubic_m

    if kind != "fgdnls_no_psi":
        s1 = batch_mode_momentum(coeffs, bandwidth)[..., None]
        # int |v|^4 is exact here: the degree-4 density has no alias on this grid
        i4 = TWO_PI * np.mean(abs_sq**2, axis=-1)[..., None]
        psi_val = 2.0 * s1 + i4 / (2.0 * TWO_PI) - m0**2
        coupling = -psi_val if kind == "fgdnls_psi_real" else -1j * psi_val
        out = out + coupling * coeffs
    if kind == "gdnls_plus":
        out = out + 2.0 * m0 * (1j * n * coeffs)
    return out


def batch_rhs(coeffs: np.ndarray, bandwidth: int, kind: str = "fgdnls") -> np.ndarray:
    n = mode_numbers(bandwidth)
    return -1j * n**2 * coeffs + batch_rhs_nonlinear(coeffs, bandwidth, kind)


def rhs(state: SpectralState, kind: str = "fgdnls") -> SpectralState:
    return SpectralState(state.bandwidth, batch_rhs(state.coeffs, state.bandwidth, kind))


def batch_rhs_term(coeffs: np.ndarray, bandwidth: int, term: str) -> np.ndarray:
    """One summand of the fgdnls right-hand side as a standalone field."""
    if term not in TERM_KINDS:
        raise ValueError(f"unknown term {term!r}, expected one of {TERM_KINDS}")
    n = mode_numbers(bandwidth)
    if term == "term_linear":
        return -1j * n**2 * coeffs

    m0 = batch_mass(coeffs)[..., None]
    if term == "term_psi_momentum":
        s1 = batch_mode_momentum(coeffs, bandwidth)[..., None]
        return -2j * s1 * coeffs
    if term == "term_psi_mass_sq":
        return 1j * m0**2 * coeffs

    m = dealias_grid_size(bandwidth, 6)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    abs_sq = np.abs(v) ** 2
    if term == "term_cubic":
        vx = evaluate_on_grid(coeffs * (1j * n), bandwidth, m)
        return -coefficients_from_grid(v * v * np.conj(vx), bandwidth)
    if term == "term_quintic":
        return 0.5j * coefficients_from_grid(abs_sq**2 * v, bandwidth)
    if term == "term_psi_quartic":
        q = np.mean(abs_sq**2, axis=-1)[..., None]
        return -0.5j * q * coeffs
    return -1j * m0 * coefficients_from_grid(abs_sq * v, bandwidth)


def rhs_term(state: SpectralState, term: str) -> SpectralState:
    return SpectralState(state.bandwidth, batch_rhs_term(state.coeffs, state.bandwidth, term))


# ---------------------------------------------------------------------------
# stepping


def default_dt(state: SpectralState) -> float:
    """Step size guard tied to the field amplitude."""
    size = fl_norm(state, 1.0, np.inf)
    return min(1e-3, 0.1 / (1.0 + size**2))


def step_ifrk4(coeffs: np.ndarray, bandwidth: int, dt: float, kind: str = "fgdnls") -> np.ndarray:
    """One step of the integrating-factor fourth-order Runge-Kutta scheme."""
    n = mode_numbers(bandwidth)
    lam = -1j * n**2
    e_half = np.exp(lam * (0.5 * dt))
    e_full = e_half * e_half

    nl = lambda c: batch_rhs_nonlinear(c, bandwidth, kind)
    k1 = nl(coeffs)
    k2 = nl(e_half * (coeffs + (0.5 * dt) * k1))
    k3 = nl(e_half * coeffs + (0.5 * dt) * k2)
    k4 = nl(e_full * coeffs + dt * (e_half * k3))
    return e_full * coeffs + (dt / 6.0) * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)


def _step_plan(t_final: float, dt: float):
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    n = int(round(t_final / dt))
    if n > 0 and abs(n * dt - t_final) <= 1e-9 * max(1.0, abs(t_final)):
        return n, 0.0
    n = int(t_final / dt)
    return n, t_final - n * dt


def _guard_finite(c: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(c.view(float))):
        mags = np.abs(c).reshape(-1, c.shape[-1])
        bad = ~np.isfinite(mags)
        mags = np.where(bad, np.inf, mags)
        worst = int(np.argmax(np.max(mags, axis=0)))
        bandwidth = (c.shape[-1] - 1) // 2
        raise BlowUpError(t, worst - bandwidth, float(np.max(mags)))


def evolve_batch(
    coeffs: np.ndarray,
    bandwidth: int,
    t_final: float,
    dt: float,
    kind: str = "fgdnls",
) -> np.ndarray:
    _check_kind(kind)
    n_steps, remainder = _step_plan(t_final, dt)
    c = np.array(coeffs, dtype=np.complex128, copy=True)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            c = step_ifrk4(c, bandwidth, dt, kind)
            _guard_finite(c, (i + 1) * dt)
        if remainder > 0:
            c = step_ifrk4(c, bandwidth, remainder, kind)
            _guard_finite(c, t_final)
    return c


def evolve(
    state: SpectralState,
    t_final: float,
    dt: float | None = None,
    kind: str = "fgdnls",
) -> SpectralState:
    if dt is None:
        dt = default_dt(state)
    out = evolve_batch(state.coeffs, state.bandwidth, t_final, dt, kind)
    return SpectralState(state.bandwidth, out)


# ---------------------------------------------------------------------------
# trajectory recording

TRAJECTORY_COLUMNS = (
    "t",
    "m",
    "H",
    "E",
    "gauged_H",
    "gauged_E",
    "full_E",
    "nonlinear_N",
    "fl_norm",
    "l2",
)


@dataclass(frozen=True)
class Trajectory:
    """Sampled scalar functionals along one evolution."""

    data: np.ndarray  # (rows, len(TRAJECTORY_COLUMNS))
    fl_s: float = DEFAULT_FL_S
    fl_r: float = DEFAULT_FL_R
    final_state: SpectralState | None = field(default=None, compare=False)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, TRAJECTORY_COLUMNS.index(name)]

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_COLUMNS)
            for row in self.data:
                writer.writerow([repr(float(x)) for x in row])


def load_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header {header!r}")
        rows = [[float(x) for x in row] for row in reader]
    return Trajectory(np.asarray(rows, dtype=float))


def _functional_row(t: float, coeffs: np.ndarray, bandwidth: int, fl_s: float, fl_r: float):
    nl, _, _, _ = batch_nonlinear_parts(coeffs, bandwidth)
    return [
        t,
        float(batch_mass(coeffs)),
        float(batch_hamiltonian(coeffs, bandwidth)),
        float(batch_energy(coeffs, bandwidth)),
        float(batch_gauged_hamiltonian(coeffs, bandwidth)),
        float(batch_gauged_energy(coeffs, bandwidth)),
        float(batch_full_energy(coeffs, bandwidth)),
        float(nl),
        float(batch_fl_norm(coeffs, bandwidth, fl_s, fl_r)),
        float(batch_l2_norm(coeffs)),
    ]


def record_trajectory(
    state: SpectralState,
    t_final: float,
    dt: float | None = None,
    kind: str = "fgdnls",
    record_every: int = 1,
    fl_s: float = DEFAULT_FL_S,
    fl_r: float = DEFAULT_FL_R,
) -> Trajectory:
    """Evolve and tabulate the scalar functionals every record_every steps."""
    _check_kind(kind)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if dt is None:
        dt = default_dt(state)
    n_steps, remainder = _step_plan(t_final, dt)
    c = np.array(state.coeffs, dtype=np.complex128, copy=True)
    bw = state.bandwidth
    rows = [_functional_row(0.0, c, bw, fl_s, fl_r)]
    t = 0.0
    for i in range(n_steps):
        c = step_ifrk4(c, bw, dt, kind)
        t = (i + 1) * dt
        if (i + 1) % record_every == 0 or (i + 1 == n_steps and remainder == 0):
            rows.append(_functional_row(t, c, bw, fl_s, fl_r))
    if remainder > 0:
        c = step_ifrk4(c, bw, remainder, kind)
        t = t_final
        rows.append(_functional_row(t, c, bw, fl_s, fl_r))
    data = np.asarray(rows, dtype=float)
    # drop duplicate time rows that can arise when the last step also hits
    # the record_every boundary
    keep = np.concatenate([[True], np.diff(data[:, 0]) > 0])
    return Trajectory(data[keep], fl_s, fl_r, SpectralState(bw, c))


# ---------------------------------------------------------------------------
# phase-space divergence
#
# Writing the right-hand side as a vector field over the real coordinates
# (Re c_n, Im c_n), its divergence equals 2 Re sum_k dF_k/dc_k, where the
# derivative is holomorphic in c_k with conj(c_k) held fixed. For every
# kind except fgdnls_psi_real that trace is purely imaginary, term by
# term, so the flows are volume preserving. The finite-difference path
# below recovers the full trace numerically for comparison.


def _field_eval(coeffs: np.ndarray, bandwidth: int, kind: str) -> np.ndarray:
    if kind in TERM_KINDS:
        return batch_rhs_term(coeffs, bandwidth, kind)
    return batch_rhs(coeffs, bandwidth, kind)


def jacobian_fd(state: SpectralState, kind: str = "fgdnls", eps: float = 1e-5) -> np.ndarray:
    """Real Jacobian of the right-hand side by central differences.

    Coordinates are ordered (Re c_{-N}, ..., Re c_N, Im c_{-N}, ..., Im c_N).
    `kind` may also name a single fgdnls term from TERM_KINDS.
    """
    if kind not in TERM_KINDS:
        _check_kind(kind)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = 2 * state.bandwidth + 1
    jac = np.empty((2 * k, 2 * k), dtype=float)
    base = state.coeffs
    for j in range(k):
        for part, bump in enumerate((eps, 1j * eps)):
            cp = base.copy()
            cm = base.copy()
            cp[j] += bump
            cm[j] -= bump
            fp = _field_eval(cp, state.bandwidth, kind)
            fm = _field_eval(cm, state.bandwidth, kind)
            col = (fp - fm) / (2.0 * eps)
            jac[:k, j + part * k] = col.real
            jac[k:, j + part * k] = col.imag
    return jac


def divergence_fd(state: SpectralState, kind: str = "fgdnls", eps: float = 1e-5) -> float:
    return float(np.trace(jacobian_fd(state, kind, eps)))


def flow_jacobian_fd(
    state: SpectralState,
    t_final: float,
    dt: float,
    kind: str = "fgdnls",
    eps: float = 1e-4,
) -> np.ndarray:
    """Real Jacobian of the time-t flow map by central differences.

    Volume preservation shows up as det = 1 up to finite-difference and
    integrator error.
    """
    k = 2 * state.bandwidth + 1
    jac = np.empty((2 * k, 2 * k), dtype=float)
    base = state.coeffs
    for j in range(k):
        for part, bump in enumerate((eps, 1j * eps)):
            cp = base.copy()
            cm = base.copy()
            cp[j] += bump
            cm[j] -= bump
            fp = evolve_batch(cp, state.bandwidth, t_final, dt, kind)
            fm = evolve_batch(cm, state.bandwidth, t_final, dt, kind)
            col = (fp - fm) / (2.0 * eps)
            jac[:k, j + part * k] = col.real
            jac[k:, j + part * k] = col.imag
    return jac


def wirtinger_trace_fd(state: SpectralState, kind: str = "fgdnls", eps: float = 1e-5) -> complex:
    """sum_k dF_k/dc_k recovered from the finite-difference Jacobian."""
    jac = jacobian_fd(state, kind, eps)
    k = 2 * state.bandwidth + 1
    daa = np.trace(jac[:k, :k])
    dbb = np.trace(jac[k:, k:])
    dba = np.trace(jac[k:, :k])
    dab = np.trace(jac[:k, k:])
    return 0.5 * ((daa + dbb) + 1j * (dba - dab))


def _trace_ingredients(state: SpectralState):
    c = state.coeffs
    n = mode_numbers(state.bandwidth)
    m0 = float(np.sum(np.abs(c) ** 2))
    s1 = float(np.sum(n * np.abs(c) ** 2))
    grid = dealias_grid_size(state.bandwidth, 4)
    v = evaluate_on_grid(c, state.bandwidth, grid)
    q = float(np.mean(np.abs(v) ** 4))  # sum over n1+n2=n3+n4 of c c cbar cbar
    return n, m0, s1, q


def holomorphic_trace_term(state: SpectralState, term: str) -> complex:
    """Closed form of sum_k dF_k/dc_k for a single fgdnls term.

    Every value is purely imaginary, which is exactly why each term on
    its own preserves phase-space volume.
    """
    if term not in TERM_KINDS:
        raise ValueError(f"unknown term {term!r}, expected one of {TERM_KINDS}")
    n, m0, s1, q = _trace_ingredients(state)
    width = float(len(n))
    if term == "term_linear":
        return -1j * float(np.sum(n.astype(float) ** 2))
    if term == "term_cubic":
        return width * 2j * s1
    if term == "term_quintic":
        return width * 1.5j * q
    if term == "term_psi_momentum":
        return -2j * s1 * (width + 1.0)
    if term == "term_psi_quartic":
        return -1j * q * (0.5 * width + 1.0)
    if term == "term_psi_mass_sq":
        return 1j * m0**2 * (width + 2.0)
    return -1j * (q + 2.0 * width * m0**2)  # term_mass_cubic


def holomorphic_trace(state: SpectralState, kind: str = "fgdnls") -> complex:
    """Closed form of sum_k dF_k/dc_k for each right-hand side."""
    if kind in TERM_KINDS:
        return holomorphic_trace_term(state, kind)
    _check_kind(kind)
    n, m0, s1, q = _trace_ingredients(state)
    width = float(len(n))
    sum_nsq = float(np.sum(n.astype(float) ** 2))
    linear = -1j * sum_nsq
    if kind == "linear":
        return linear
    if kind == "dnls":
        return linear + 2j * m0 * float(np.sum(n))

    cubic = width * 2j * s1
    quintic = width * 1.5j * q
    mass_cubic = -1j * (q + 2.0 * width * m0**2)
    total = linear + cubic + quintic + mass_cubic
    if kind == "gdnls_plus":
        total = total + 2j * s1
    if kind in ("fgdnls", "gdnls_plus"):
        psi_val = 2.0 * s1 + 0.5 * q - m0**2
        total = total - 1j * (width * psi_val + 2.0 * s1 + q - 2.0 * m0**2)
    elif kind == "fgdnls_psi_real":
        psi_val = 2.0 * s1 + 0.5 * q - m0**2
        total = total - (width * psi_val + 2.0 * s1 + q - 2.0 * m0**2)
    return total


def divergence_analytic(state: SpectralState, kind: str = "fgdnls") -> float:
    """Exact phase-space divergence; zero for all volume-preserving kinds."""
    return 2.0 * holomorphic_trace(state, kind).real
