"""Gauge transformation for the periodic derivative Schrodinger equation.

The transformation multiplies a field by a phase built from its own
modulus, G(f) = exp(-i J(f)) f, where J(f) is the unique zero-mean
periodic antiderivative of |f|^2 - m(f). Since the phase factor has
unit modulus, |G(f)| = |f| pointwise, so J(G(f)) = J(f) and the inverse
is simply multiplication by the conjugate phase.

The phase factor is analytic but not band-limited, so G(f) is truncated
to a configurable output bandwidth (default four times the input). The
discarded spectral mass can be measured with gauge_truncation_tail.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import next_fast_len

from .functionals import mass
from .spectral import (
    SpectralState,
    coefficients_from_grid,
    evaluate_on_grid,
    mode_numbers,
    multiply_truncated,
    translate,
)


def gauge_phase(state: SpectralState) -> SpectralState:
    """Zero-mean antiderivative J(f) of |f|^2 - m(f), as a band-2N state."""
    band = 2 * state.bandwidth
    sq = multiply_truncated([(state, False), (state, True)], band)
    n = mode_numbers(band)
    coeffs = np.zeros_like(sq.coeffs)
    nz = n != 0
    coeffs[nz] = sq.coeffs[nz] / (1j * n[nz])
    return SpectralState(band, coeffs)


def _phase_grid(state: SpectralState, out_bandwidth: int) -> int:
    width = max(6 * (2 * state.bandwidth + 1), 3 * (2 * out_bandwidth + 1), 32)
    return next_fast_len(width)


def _apply_phase(state: SpectralState, sign: float, out_bandwidth: int | None):
    if out_bandwidth is None:
        out_bandwidth = 4 * state.bandwidth
    grid_size = _phase_grid(state, out_bandwidth)
    phase = gauge_phase(state)
    j_vals = evaluate_on_grid(phase.coeffs, phase.bandwidth, grid_size).real
    f_vals = evaluate_on_grid(state.coeffs, state.bandwidth, grid_size)
    w_vals = np.exp(sign * 1j * j_vals) * f_vals
    return w_vals, grid_size, out_bandwidth


def gauge_forward(state: SpectralState, out_bandwidth: int | None = None) -> SpectralState:
    """G(f) = exp(-i J(f)) f, truncated to out_bandwidth."""
    w_vals, _, out = _apply_phase(state, -1.0, out_bandwidth)
    return SpectralState(out, coefficients_from_grid(w_vals, out))


def gauge_inverse(state: SpectralState, out_bandwidth: int | None = None) -> SpectralState:
    """G^{-1}(w) = exp(+i J(w)) w, truncated to out_bandwidth."""
    u_vals, _, out = _apply_phase(state, +1.0, out_bandwidth)
    return SpectralState(out, coefficients_from_grid(u_vals, out))


def gauge_truncation_tail(state: SpectralState, out_bandwidth: int | None = None) -> float:
    """L^2 norm of the spectral content of G(f) beyond the output band."""
    w_vals, grid_size, out = _apply_phase(state, -1.0, out_bandwidth)
    spec = np.fft.fft(w_vals) / grid_size
    nyquist = (grid_size - 1) // 2
    kept = np.zeros(grid_size, dtype=bool)
    kept[mode_numbers(min(out, nyquist)) % grid_size] = True
    tail_sq = np.sum(np.abs(spec[~kept]) ** 2)
    return float(np.sqrt(2.0 * np.pi * tail_sq))


def gamma_translate(state: SpectralState, t: float) -> SpectralState:
    """Mass-proportional translation w(x) -> w(x - 2 t m(w))."""
    return translate(state, 2.0 * t * mass(state))


def full_gauge(state: SpectralState, t: float, out_bandwidth: int | None = None) -> SpectralState:
    """Time-indexed gauge: translate G(f) by 2 t m(f)."""
    return gamma_translate(gauge_forward(state, out_bandwidth), t)


def full_gauge_inverse(state: SpectralState, t: float, out_bandwidth: int | None = None) -> SpectralState:
    """Inverse of full_gauge at the same time t."""
    return gauge_inverse(translate(state, -2.0 * t * mass(state)), out_bandwidth)
