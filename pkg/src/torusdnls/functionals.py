"""Scalar functionals of a periodic field: mass, momentum, energies.

Every integral is evaluated by uniform-grid quadrature on a grid large
enough that the (trigonometric polynomial) integrand is resolved exactly,
so the only error is rounding. Most functions have a vectorized `batch_*`
twin operating on a (count, 2N+1) coefficient matrix; the scalar versions
wrap the batch cores, keeping one code path.

Conventions (fixed throughout the package):
    mass      m(v)   = (1/2pi) int |v|^2        = sum |c_n|^2
    psi(v)           = -(1/pi) int Im(v conj(v_x)) + (1/4pi) int |v|^4 - m^2
    H(u)             = Im int u conj(u_x) + (1/2) int |u|^4
    E(u)             = int |u_x|^2 + (3/2) Im int u^2 conj(u) conj(u_x)
                       + (1/2) int |u|^6
    gauged_H(w)      = Im int w conj(w_x) - (1/2) int |w|^4 + 2 pi m^2
    gauged_E(w)      = int |w_x|^2 - (1/2) Im int w^2 conj(w) conj(w_x)
                       + (1/4pi) (int |w|^2)(int |w|^4)
    full_E(w)        = gauged_E + 2 m gauged_H - 2 pi m^3
    nonlinear_N(v)   = full_E(v) - int |v_x|^2 = F + G + K
    X(v)             = int v conj(v_x) = -2 pi i sum n |c_n|^2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    SpectralState,
    TWO_PI,
    dealias_grid_size,
    evaluate_on_grid,
    japanese_bracket,
    mode_numbers,
)

# ---------------------------------------------------------------------------
# batch cores; coeffs has shape (..., 2N+1)


def batch_mass(coeffs: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(coeffs) ** 2, axis=-1)


def batch_mode_momentum(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """sum n |c_n|^2, the spectral center of the field."""
    n = mode_numbers(bandwidth)
    return np.sum(n * np.abs(coeffs) ** 2, axis=-1)


def batch_kinetic(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """int |v_x|^2 = 2 pi sum n^2 |c_n|^2."""
    n = mode_numbers(bandwidth)
    return TWO_PI * np.sum(n**2 * np.abs(coeffs) ** 2, axis=-1)


def _quartic_grid_values(coeffs: np.ndarray, bandwidth: int):
    m = dealias_grid_size(bandwidth, 4)
    n = mode_numbers(bandwidth)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    vx = evaluate_on_grid(coeffs * (1j * n), bandwidth, m)
    return v, vx


def batch_l4_int(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """int |v|^4 dx."""
    m = dealias_grid_size(bandwidth, 4)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    return TWO_PI * np.mean(np.abs(v) ** 4, axis=-1)


def batch_l6_int(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """int |v|^6 dx."""
    m = dealias_grid_size(bandwidth, 6)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    return TWO_PI * np.mean(np.abs(v) ** 6, axis=-1)


def batch_cubic_derivative_int(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """int v^2 conj(v) conj(v_x) dx (complex)."""
    v, vx = _quartic_grid_values(coeffs, bandwidth)
    return TWO_PI * np.mean(v * v * np.conj(v) * np.conj(vx), axis=-1)


def batch_psi(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    s1 = batch_mode_momentum(coeffs, bandwidth)
    m0 = batch_mass(coeffs)
    return 2.0 * s1 + batch_l4_int(coeffs, bandwidth) / (2.0 * TWO_PI) - m0**2


def batch_hamiltonian(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    s1 = batch_mode_momentum(coeffs, bandwidth)
    return -TWO_PI * s1 + 0.5 * batch_l4_int(coeffs, bandwidth)


def batch_energy(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    cubic = batch_cubic_derivative_int(coeffs, bandwidth)
    return (
        batch_kinetic(coeffs, bandwidth)
        + 1.5 * cubic.imag
        + 0.5 * batch_l6_int(coeffs, bandwidth)
    )


def batch_gauged_hamiltonian(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    s1 = batch_mode_momentum(coeffs, bandwidth)
    m0 = batch_mass(coeffs)
    return -TWO_PI * s1 - 0.5 * batch_l4_int(coeffs, bandwidth) + TWO_PI * m0**2


def batch_gauged_energy(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    cubic = batch_cubic_derivative_int(coeffs, bandwidth)
    i2 = TWO_PI * batch_mass(coeffs)
    i4 = batch_l4_int(coeffs, bandwidth)
    return batch_kinetic(coeffs, bandwidth) - 0.5 * cubic.imag + i2 * i4 / (2.0 * TWO_PI)


def batch_full_energy(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    m0 = batch_mass(coeffs)
    return (
        batch_gauged_energy(coeffs, bandwidth)
        + 2.0 * m0 * batch_gauged_hamiltonian(coeffs, bandwidth)
        - TWO_PI * m0**3
    )


def batch_nonlinear_parts(coeffs: np.ndarray, bandwidth: int):
    """Nonlinear part of full_E and its decomposition.

    Returns (nonlinear_N, F, G, K) with
        F = -(1/2) Im int v^2 conj(v) conj(v_x)
        G = -(1/4pi) (int |v|^2)(int |v|^4)
        K = (1/pi) (int |v|^2)(Im int v conj(v_x)) + (1/4pi^2)(int |v|^2)^3
    and the identity full_E = int |v_x|^2 + nonlinear_N.
    """
    cubic = batch_cubic_derivative_int(coeffs, bandwidth)
    i2 = TWO_PI * batch_mass(coeffs)
    i4 = batch_l4_int(coeffs, bandwidth)
    momentum = -TWO_PI * batch_mode_momentum(coeffs, bandwidth)  # Im int v conj(v_x)
    f_part = -0.5 * cubic.imag
    g_part = -i2 * i4 / (2.0 * TWO_PI)
    k_part = 2.0 * i2 * momentum / TWO_PI + i2**3 / TWO_PI**2
    return f_part + g_part + k_part, f_part, g_part, k_part


def batch_momentum_x(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """X(v) = int v conj(v_x) = -2 pi i sum n |c_n|^2 (purely imaginary)."""
    return -TWO_PI * 1j * batch_mode_momentum(coeffs, bandwidth)


def batch_fl_norm(coeffs: np.ndarray, bandwidth: int, s: float, r: float) -> np.ndarray:
    if r < 1:
        raise ValueError("r must be >= 1")
    w = japanese_bracket(mode_numbers(bandwidth)) ** s
    terms = w * np.abs(coeffs)
    if np.isinf(r):
        return np.max(terms, axis=-1)
    return np.sum(terms**r, axis=-1) ** (1.0 / r)


def batch_l2_norm(coeffs: np.ndarray) -> np.ndarray:
    return np.sqrt(TWO_PI * batch_mass(coeffs))


# ---------------------------------------------------------------------------
# scalar interface


def _scalar(fn, state: SpectralState, *args):
    return float(fn(state.coeffs, state.bandwidth, *args))


def mass(state: SpectralState) -> float:
    return float(batch_mass(state.coeffs))


def psi(state: SpectralState) -> float:
    return _scalar(batch_psi, state)


def hamiltonian_H(state: SpectralState) -> float:
    return _scalar(batch_hamiltonian, state)


def energy_E(state: SpectralState) -> float:
    return _scalar(batch_energy, state)


def gauged_H(state: SpectralState) -> float:
    return _scalar(batch_gauged_hamiltonian, state)


def gauged_E(state: SpectralState) -> float:
    return _scalar(batch_gauged_energy, state)


def full_energy(state: SpectralState) -> float:
    return _scalar(batch_full_energy, state)


def nonlinear_parts(state: SpectralState):
    """Returns (nonlinear_N, F_part, G_part, K_part)."""
    nl, f, g, k = batch_nonlinear_parts(state.coeffs, state.bandwidth)
    return float(nl), float(f), float(g), float(k)


def momentum_X(state: SpectralState) -> complex:
    return complex(batch_momentum_x(state.coeffs, state.bandwidth))


# ---------------------------------------------------------------------------
# instantaneous production rates of the energies under the truncated flow
#
# The truncated evolution conserves full_E only up to the spectral flux
# through the projection cutoff. The exact instantaneous rates are sums
# of pairings of cubic densities against the high-frequency remainders
# P_perp(.) of the three nonlinear products; each pairing is computed on
# a grid resolving the full (degree-8) integrand, so the rates are exact
# up to rounding.


def _perp_products(coeffs: np.ndarray, bandwidth: int):
    m = dealias_grid_size(bandwidth, 8)
    n = mode_numbers(bandwidth)
    v = evaluate_on_grid(coeffs, bandwidth, m)
    vx = evaluate_on_grid(coeffs * (1j * n), bandwidth, m)

    def perp(vals):
        spec = np.fft.fft(vals, axis=-1) / m
        low = np.zeros_like(spec)
        low[..., n % m] = spec[..., n % m]
        return np.fft.ifft(spec - low, axis=-1) * m

    cubic_d = perp(v * v * np.conj(vx))  # P_perp(v^2 conj(v_x))
    quintic = perp(np.abs(v) ** 4 * v)  # P_perp(|v|^4 v)
    cubic_m = perp(np.abs(v) ** 2 * v)  # P_perp(|v|^2 v)
    q1 = v * np.conj(v) * np.conj(vx)  # v conj(v v_x)
    q2 = v * np.conj(v) ** 2  # v conj(v)^2
    pair = lambda a, b: TWO_PI * np.mean(a * b, axis=-1)
    return cubic_d, quintic, cubic_m, q1, q2, pair


def batch_gauged_E_rate(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    a, b, c, q1, q2, pair = _perp_products(coeffs, bandwidth)
    m0 = batch_mass(coeffs)
    return (
        -2.0 * pair(q1, a).imag
        + pair(q1, b).real
        - 2.0 * m0 * pair(q1, c).real
        + 2.0 * m0 * pair(q2, a).real
        + m0 * pair(q2, b).imag
        - 2.0 * m0**2 * pair(q2, c).imag
    )


def batch_gauged_H_rate(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    a, b, c, _, q2, pair = _perp_products(coeffs, bandwidth)
    m0 = batch_mass(coeffs)
    return (
        -2.0 * pair(q2, a).real - pair(q2, b).imag + 2.0 * m0 * pair(q2, c).imag
    )


def batch_energy_drift_rate(coeffs: np.ndarray, bandwidth: int) -> np.ndarray:
    """d/dt full_E along the truncated flow, evaluated at the given state."""
    a, b, c, q1, q2, pair = _perp_products(coeffs, bandwidth)
    m0 = batch_mass(coeffs)
    return (
        -2.0 * pair(q1, a).imag
        + pair(q1, b).real
        - 2.0 * m0 * pair(q1, c).real
        - 2.0 * m0 * pair(q2, a).real
        - m0 * pair(q2, b).imag
        + 2.0 * m0**2 * pair(q2, c).imag
    )


def gauged_E_rate(state: SpectralState) -> float:
    return _scalar(batch_gauged_E_rate, state)


def gauged_H_rate(state: SpectralState) -> float:
    return _scalar(batch_gauged_H_rate, state)


def energy_drift_rate(state: SpectralState) -> float:
    return _scalar(batch_energy_drift_rate, state)


# ---------------------------------------------------------------------------
# bundled report

ENERGY_REPORT_COLUMNS = (
    "m",
    "psi",
    "H",
    "E",
    "gauged_H",
    "gauged_E",
    "full_E",
    "nonlinear_N",
    "F_part",
    "G_part",
    "K_part",
    "X_re",
    "X_im",
)


@dataclass(frozen=True)
class EnergyReport:
    """All scalar functionals of one state."""

    m: float
    psi: float
    H: float
    E: float
    gauged_H: float
    gauged_E: float
    full_E: float
    nonlinear_N: float
    F_part: float
    G_part: float
    K_part: float
    X: complex

    def to_json_dict(self) -> dict:
        row = {k: getattr(self, k) for k in ENERGY_REPORT_COLUMNS[:-2]}
        row["X_re"] = self.X.real
        row["X_im"] = self.X.imag
        return row

    def to_csv_row(self) -> list:
        d = self.to_json_dict()
        return [d[k] for k in ENERGY_REPORT_COLUMNS]


def energy_report(state: SpectralState) -> EnergyReport:
    nl, f, g, k = nonlinear_parts(state)
    return EnergyReport(
        m=mass(state),
        psi=psi(state),
        H=hamiltonian_H(state),
        E=energy_E(state),
        gauged_H=gauged_H(state),
        gauged_E=gauged_E(state),
        full_E=full_energy(state),
        nonlinear_N=nl,
        F_part=f,
        G_part=g,
        K_part=k,
        X=momentum_X(state),
    )
